"""Back-traversal of singly linked lists with a logarithmic pebble synopsis."""

from .amortized import BasicSynopsis, RefinedSynopsis
from .baselines import (RestartFromHead, Skeleton, TrailingAll, UniformK,
                        UnsupportedOperation, oracle_back)
from .hashchain import Backstepper, backstepper, chain_values, sha256, toy_hash, verify
from .harness import BoundViolation, build, run_ops
from .psp import (EndOfList, GeneratedProvider, Pebble, Provider, StepCounters,
                  VectorProvider)
from .recycling import RecyclingBin, RecyclingBinError
from .rollback import DeltaStore, MiniVM, ReversibleVM, Snapshot, tree_walk_adapter
from .supernode import SuperNodeSynopsis
from .tradeoff import KarySynopsis, Mode, TradeoffConfig
from .vtree import NodeId, TreeShape
from .worstcase import SynopsisError, WorstCaseSynopsis

__version__ = "0.1.0"

__all__ = [
    "BasicSynopsis", "RefinedSynopsis", "WorstCaseSynopsis", "KarySynopsis",
    "SuperNodeSynopsis", "TradeoffConfig", "Mode",
    "RestartFromHead", "TrailingAll", "UniformK", "Skeleton", "oracle_back",
    "UnsupportedOperation", "Provider", "VectorProvider", "GeneratedProvider",
    "Pebble", "StepCounters", "EndOfList", "SynopsisError", "RecyclingBin",
    "RecyclingBinError", "TreeShape", "NodeId", "Backstepper", "backstepper",
    "chain_values", "verify", "toy_hash", "sha256", "MiniVM", "Snapshot",
    "ReversibleVM", "DeltaStore", "tree_walk_adapter", "build", "run_ops",
    "BoundViolation",
]
