from thcodec.cli.main import app

__all__ = ["app"]
