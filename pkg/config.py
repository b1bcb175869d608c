"""
Semi-Markov Credit Engine Configuration
"""
import os
import tempfile

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _float_env(name, default):
    return float(os.getenv(name, default))


def _int_env(name, default):
    return int(os.getenv(name, default))


class Config:
    """Base configuration class"""

    # Model validation tolerances
    ROW_SUM_TOL = _float_env("ROW_SUM_TOL", "1e-9")
    CDF_TERMINAL_TOL = _float_env("CDF_TERMINAL_TOL", "1e-12")

    # Transition-probability table bounds
    PHI_MAX_HORIZON = _int_env("PHI_MAX_HORIZON", "120")
    PHI_MAX_BACKWARD = _int_env("PHI_MAX_BACKWARD", "240")
    NORMALIZATION_TOL = _float_env("NORMALIZATION_TOL", "1e-9")

    # Pricing
    GRID_MASS_TOL = _float_env("GRID_MASS_TOL", "1e-8")
    RESIDUAL_MASS_TOL = _float_env("RESIDUAL_MASS_TOL", "1e-6")
    REFERENCE_COMPONENT = _int_env("REFERENCE_COMPONENT", "1")  # C; the seller B is the other one

    # Monte Carlo
    SIM_PATHS = _int_env("SIM_PATHS", "100000")
    SIM_SEED = _int_env("SIM_SEED", "20240101")
    SIM_BLOCK_SIZE = _int_env("SIM_BLOCK_SIZE", "4096")  # paths per random substream

    # Output
    CSV_DIGITS = 17
    OUTPUT_DIR = os.getenv("OUTPUT_DIR", "output")

    # Logging settings
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "engine.log")


class DevelopmentConfig(Config):
    """Development configuration"""
    LOG_LEVEL = os.getenv("LOG_LEVEL", "DEBUG")


class ProductionConfig(Config):
    """Production configuration"""
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    SIM_PATHS = 20000
    LOG_FILE = None
    OUTPUT_DIR = os.path.join(tempfile.gettempdir(), "engine-test-output")


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
