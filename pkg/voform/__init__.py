"""
vo-formation - Virtual Organisation formation for agent societies.

Agents in a society of services, protocol roles and goals form a virtual
organisation through six checked transitions: identify goals, discover
partners, select partners, establish roles, agree a workflow and agree
contracts.
"""

__version__ = "0.1.0"
__author__ = "vo-formation developers"
__description__ = "Checked virtual organisation formation for agent societies"
