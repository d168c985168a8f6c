"""
ratimpl - Rationalizable implementation toolkit factory
"""

import logging
import os

from config import config


def init_toolkit(config_name=None):
    """Toolkit factory"""
    if config_name is None:
        config_name = os.getenv('RATIMPL_ENV', 'development')

    cfg = config[config_name]

    logging.basicConfig(
        level=getattr(logging, str(cfg.LOG_LEVEL).upper(), logging.WARNING),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )

    # Initialize services
    from ratimpl.services.settings import SolverSettings

    SolverSettings.init_app(cfg)

    return cfg
