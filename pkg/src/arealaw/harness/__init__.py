"""Command-line pipelines and report generation."""
from .analysis import (ChainGeometry, Comparison, ProofChainRecord, SaturationResult,
                       proof_chain_report, saturation_scan)
from .pipeline import SUBCOMMANDS, run_pipeline

__all__ = ["ChainGeometry", "Comparison", "ProofChainRecord", "SaturationResult", "SUBCOMMANDS",
           "proof_chain_report", "run_pipeline", "saturation_scan"]
