"""HTTP service wrapping the assessment, simulation and benchmark pipelines."""

from hetscan.service.app import create_app

__all__ = ["create_app"]
