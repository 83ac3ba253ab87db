from .model import (
    PLACEHOLDER_RE,
    ClosedQAPolicy,
    EntityDef,
    FormDef,
    IntentDef,
    PersonaDef,
    ProjectConfig,
    ResponseTemplate,
    SlotDef,
    TemplateVariant,
    ThresholdConfig,
    TrainingExample,
    extract_placeholders,
    validate,
)
from .store import load_project, save_project

__all__ = [
    "PLACEHOLDER_RE",
    "ClosedQAPolicy",
    "EntityDef",
    "FormDef",
    "IntentDef",
    "PersonaDef",
    "ProjectConfig",
    "ResponseTemplate",
    "SlotDef",
    "TemplateVariant",
    "ThresholdConfig",
    "TrainingExample",
    "extract_placeholders",
    "validate",
    "load_project",
    "save_project",
]
