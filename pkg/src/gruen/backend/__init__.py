from .base import (
    BackendHandle,
    BackendUnavailableError,
    BundleComponentMissingError,
    BundleError,
    BundleFileMissingError,
    BundleFormatError,
    BundleIntegrityError,
)
from .bundle import ModelBundle, file_sha256, read_bundle
from .neural import NeuralBackend, load_bundle
from .stub import StubBackend
from .wordpiece import WordpieceVocab

__all__ = [
    "BackendHandle",
    "BackendUnavailableError",
    "BundleComponentMissingError",
    "BundleError",
    "BundleFileMissingError",
    "BundleFormatError",
    "BundleIntegrityError",
    "ModelBundle",
    "NeuralBackend",
    "StubBackend",
    "WordpieceVocab",
    "file_sha256",
    "load_bundle",
    "read_bundle",
]
