"""HTTP service wrapping the pipeline (FastAPI)."""
