"""speechcrowd: self-hostable crowdsourcing platform for dialect-tagged speech."""

__version__ = "0.1.0"
