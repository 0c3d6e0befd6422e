"""GPR B-scan synthesis, WGAN-GP augmentation, and classifier evaluation."""

from .bscan import CANVAS_SIZE, CLASS_NAMES, AScan, BScan, ClassLabel, RadarImage
from .dataset import DatasetManifest, load_dataset, save_dataset
from .distances import DiscreteDistribution, EmpiricalSample, kl_divergence, mse, wasserstein_1d
from .freq import FrequencyBScan, SpectrogramConfig, frequency_bscan, stft_magnitude
from .metrics import ClassificationReport, ConfusionMatrix, confusion_matrix, report
from .preprocess import preprocess_bscan
from .resize import resize_to_canvas

__version__ = "0.1.0"

__all__ = [
    "AScan",
    "BScan",
    "CANVAS_SIZE",
    "CLASS_NAMES",
    "ClassLabel",
    "ClassificationReport",
    "ConfusionMatrix",
    "DatasetManifest",
    "DiscreteDistribution",
    "EmpiricalSample",
    "FrequencyBScan",
    "RadarImage",
    "SpectrogramConfig",
    "confusion_matrix",
    "frequency_bscan",
    "kl_divergence",
    "load_dataset",
    "mse",
    "preprocess_bscan",
    "report",
    "resize_to_canvas",
    "save_dataset",
    "stft_magnitude",
    "wasserstein_1d",
    "__version__",
]
