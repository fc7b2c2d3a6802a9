"""HTTP membership oracle serving masked-LM pronoun predictions."""

from .app import create_app
from .backends import KNOWN_MODELS, SYNTHETIC_MODELS, TRANSFORMER_MODELS

__version__ = "0.1.0"
