"""Interactive product-line configuration with content-based recommendations.

The pieces: a feature-model core (`model`), a three-valued decision engine
with unit propagation (`engine`), TF-IDF/cosine catalog ranking
(`recommend`), interactive sessions (`session`), bundled example data
(`fixtures`), plus an HTTP service (`service`) and CLI (`cli`) kept out of
this namespace so importing the library stays light.
"""

from .engine import (
    Backbone,
    DecisionState,
    Outcome,
    PartialConfiguration,
    PropagationResult,
    Provenance,
    Violation,
    backbone,
    check_full,
    enumerate_valid,
    is_complete,
    is_valid,
    propagate,
)
from .fixtures import load_fixture, run_scenario
from .model import (
    Attribute,
    ConstraintKind,
    CrossConstraint,
    Facet,
    Feature,
    FeatureModel,
    Group,
    ModelParseError,
    ModelValidationError,
    UnknownFacetError,
    UnknownFeatureError,
    Variability,
    facet_members,
    parse_model,
    serialize_model,
    validate_wellformed,
)
from .recommend import (
    Catalog,
    CatalogEntry,
    CatalogError,
    Recommendation,
    TermVector,
    VectorIndex,
    build_index,
    cosine,
    parse_catalog,
    rank,
    recommend_valid,
    tf_idf_weight,
    vectorize,
)
from .session import (
    Session,
    SessionClosedError,
    SessionError,
    SessionEvent,
    SessionStatus,
    StaleRecommendationError,
    apply_recommendation,
    decide,
    export_log,
    new_session,
    recommendations,
    retract,
    suggest_next,
)

__all__ = [name for name in dir() if not name.startswith("_")]
