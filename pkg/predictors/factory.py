from typing import Dict, List, Optional, Type

from .ablations import ArimaOnlyPredictor, PaOnlyPredictor
from .base import BasePredictor
from .parima import ParimaPredictor


class PredictorFactory:
    """Factory class for managing viewport predictors."""

    _predictors: Dict[str, Type[BasePredictor]] = {
        'parima': ParimaPredictor,
        'arima_only': ArimaOnlyPredictor,
        'pa_only': PaOnlyPredictor,
    }

    @classmethod
    def get_available_predictors(cls) -> List[str]:
        """
        Get list of available predictor names.

        Returns:
            List of predictor names
        """
        return list(cls._predictors.keys())

    @classmethod
    def create_predictor(cls, name: str, cfg) -> Optional[BasePredictor]:
        """
        Create a predictor instance by name.

        Args:
            name: Variant name
            cfg: ExperimentConfig the session is built from

        Returns:
            Predictor instance or None if the variant has no predictor
        """
        predictor_class = cls._predictors.get(name.lower())
        if predictor_class:
            return predictor_class.from_config(cfg)
        return None

    @classmethod
    def register_predictor(cls, name: str, predictor_class: Type[BasePredictor]) -> None:
        """
        Register a new predictor.

        Args:
            name: Name for the predictor
            predictor_class: Predictor class to register
        """
        cls._predictors[name.lower()] = predictor_class
