"""
Base class for the experiment pipeline stages
"""

import logging
from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from ..utils.exceptions import NumericFailureError, PhaseCoverError

logger = logging.getLogger(__name__)


class BaseSuite(ABC):
    """Abstract base class for every suite of the experiment pipeline"""

    def __init__(self, name: str):
        self.name = name

    def log(self, message: str, level: int = logging.INFO) -> None:
        logger.log(level, f"[{self.name}] {message}")

    def run(self, ctx: Any) -> Any:
        """Run `process`, turning unexpected numeric errors into NumericFailureError"""
        try:
            return self.process(ctx)
        except PhaseCoverError:
            raise
        except (np.linalg.LinAlgError, ArithmeticError, ValueError, IndexError) as e:
            raise NumericFailureError(self.name, f"{type(e).__name__}: {e}") from e

    @abstractmethod
    def process(self, ctx: Any) -> Any:
        """Process method to be implemented by each suite"""
        pass

    def cleanup(self) -> None:
        """Cleanup resources - can be overridden by subclasses"""
        pass
