import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Base directory of the toolkit
BASE_DIR = Path(__file__).parent.absolute()


class Config:
    # Rationalizability solver
    PROFILE_CAP = int(os.getenv('RATIMPL_PROFILE_CAP', 1000000))
    BELIEF_MODEL = os.getenv('RATIMPL_BELIEFS', 'correlated')

    # Axiom search
    EVENT_STATE_CAP = int(os.getenv('RATIMPL_EVENT_STATE_CAP', 12))
    REFINEMENT_CAP = int(os.getenv('RATIMPL_REFINEMENT_CAP', 100000))

    # Environments and mechanisms
    VALIDATION = os.getenv('RATIMPL_VALIDATION', 'lenient')
    DEFAULT_NMAX = int(os.getenv('RATIMPL_NMAX', 8))
    EXAMPLES_PATH = os.getenv('RATIMPL_EXAMPLES_PATH', str(BASE_DIR / 'ratimpl' / 'data' / 'examples'))

    # Random-instance suites
    RANDOM_SEED = int(os.getenv('RATIMPL_SEED', 20240607))
    RANDOM_INSTANCES = int(os.getenv('RATIMPL_RANDOM_INSTANCES', 200))

    # Logging
    LOG_LEVEL = os.getenv('RATIMPL_LOG_LEVEL', 'WARNING')


class DevelopmentConfig(Config):
    DEBUG = True


class TestingConfig(Config):
    DEBUG = True

    # Fixed values, whatever .env says
    PROFILE_CAP = 1000000
    BELIEF_MODEL = 'correlated'
    EVENT_STATE_CAP = 12
    REFINEMENT_CAP = 100000
    VALIDATION = 'lenient'
    DEFAULT_NMAX = 8
    RANDOM_SEED = 20240607
    RANDOM_INSTANCES = 200


class ProductionConfig(Config):
    DEBUG = False


config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}
