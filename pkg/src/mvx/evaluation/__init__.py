"""Evaluators for both surface languages over model snapshots."""

from .env import Env
from .navex_eval import eval_navex
from .ocl_eval import eval_ocl

__all__ = ["Env", "eval_navex", "eval_ocl"]
