"""Application reductions: each builder emits a plain depletion instance."""

from .adwords import AdwordsParams, adwords_params_from_dict, build_adwords_instance
from .broadcast import BroadcastParams, broadcast_params_from_dict, build_broadcast_instance
from .matroid import (
    MatroidParams,
    build_cardinality_matroid_instance,
    build_partition_matroid_instance,
    matroid_params_from_dict,
)
from .product_line import (
    ProductLineParams,
    bargain_hunter_params,
    build_product_line_instance,
    feasible_assortments,
    product_line_params_from_dict,
)
from .queueing import QueueingParams, build_queueing_instance, queueing_params_from_dict
from .random_families import random_linear_decaying_instance, random_submodular_instance
from .set_cover import build_set_cover_instance
from .worst_case import build_worst_case_instance

__all__ = [
    "AdwordsParams",
    "BroadcastParams",
    "MatroidParams",
    "ProductLineParams",
    "QueueingParams",
    "adwords_params_from_dict",
    "bargain_hunter_params",
    "broadcast_params_from_dict",
    "build_adwords_instance",
    "build_broadcast_instance",
    "build_cardinality_matroid_instance",
    "build_partition_matroid_instance",
    "build_product_line_instance",
    "build_queueing_instance",
    "build_set_cover_instance",
    "build_worst_case_instance",
    "feasible_assortments",
    "matroid_params_from_dict",
    "product_line_params_from_dict",
    "queueing_params_from_dict",
    "random_linear_decaying_instance",
    "random_submodular_instance",
]
