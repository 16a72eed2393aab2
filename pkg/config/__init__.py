from .rules import SEARCH_SETTINGS, EXIT_CODES, get_setting

__all__ = ['SEARCH_SETTINGS', 'EXIT_CODES', 'get_setting']
