"""Command-line interface and presentation DSL."""
from .dsl import DSLSpec, ParseError, SpaceSpec, build_presentation, parse_dsl
from .main import Report, RunConfig, build_parser, main, run

__all__ = ["DSLSpec", "ParseError", "SpaceSpec", "build_presentation", "parse_dsl",
           "Report", "RunConfig", "build_parser", "main", "run"]
