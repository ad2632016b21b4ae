# -*- coding: utf-8 -*-
"""
CBCChaos Version Information

Centralized version management for the library and command line.
"""

# Version info
VERSION = "1.0.0"
VERSION_NAME = "Initial Release"

# Application info
APP_NAME = "CBCChaos"
APP_DESCRIPTION = "Devaney-chaos analysis of the CBC mode of operation"


def get_full_version_string() -> str:
    """Return full version string with name."""
    return f"{APP_NAME} v{VERSION} - {VERSION_NAME}"
