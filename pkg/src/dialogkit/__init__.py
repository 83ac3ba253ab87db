"""dialogkit: a pipeline conversational-agent engine (NLU, dialog management,
NLG) with LLM-assisted authoring and runtime boosters."""

__version__ = "0.1.0"
