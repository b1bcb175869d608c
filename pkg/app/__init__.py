"""
Semi-Markov Credit Engine Application Factory
"""
import os
import sys
import logging

from rich.console import Console
from rich.logging import RichHandler

# Add project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import config
from utils.model import BivariateModel, load_model
from utils.phi_solver import PhiSolver, solver_for


class Engine:
    """Configuration plus the per-model solvers shared by the commands of one run."""

    def __init__(self, config_class):
        self.config = config_class
        self.console = Console(stderr=True)

    def load(self, path) -> BivariateModel:
        return load_model(path, self.config)

    def solver(self, model: BivariateModel) -> PhiSolver:
        return solver_for(model, self.config)


def _configure_logging(config_class):
    handlers = [RichHandler(console=Console(stderr=True), show_path=False)]
    if config_class.LOG_FILE:
        file_handler = logging.FileHandler(config_class.LOG_FILE)
        file_handler.setFormatter(
            logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        )
        handlers.append(file_handler)
    logging.basicConfig(
        level=getattr(logging, str(config_class.LOG_LEVEL).upper(), logging.INFO),
        format='%(message)s',
        handlers=handlers,
    )


def create_app(config_name='default'):
    """Application factory: resolve the configuration and set up logging"""
    config_class = config.get(config_name, config['default'])
    _configure_logging(config_class)

    # Ensure output directory exists
    os.makedirs(config_class.OUTPUT_DIR, exist_ok=True)

    return Engine(config_class)
