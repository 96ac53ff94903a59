#!/usr/bin/env python3
"""
Shared pytest fixtures for the optospring test suite
"""

import pytest
import structlog


@pytest.fixture(autouse=True)
def reset_structlog():
    """Each test starts and ends with structlog's default configuration"""
    structlog.reset_defaults()
    yield
    structlog.reset_defaults()
