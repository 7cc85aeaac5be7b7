"""Task-tree planning for recipes over a functional object-oriented network."""

from .graph import FunctionalUnit, MotionNode, ObjectNode, Subgraph, UniversalFOON, merge
from .pipeline import Planner, PlanResult
from .retrieval import Kitchen, PlanRequest, TaskTree, find_reference_goal, retrieve_task_tree

__all__ = [
    "FunctionalUnit",
    "Kitchen",
    "MotionNode",
    "ObjectNode",
    "PlanRequest",
    "PlanResult",
    "Planner",
    "Subgraph",
    "TaskTree",
    "UniversalFOON",
    "find_reference_goal",
    "merge",
    "retrieve_task_tree",
]
