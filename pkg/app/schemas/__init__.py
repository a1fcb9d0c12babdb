from pydantic import BaseModel, ConfigDict


class BaseSchema(BaseModel):
    """Immutable value shared freely between workers."""

    model_config = ConfigDict(frozen=True)


class BaseReport(BaseModel):
    model_config = ConfigDict(from_attributes=True)
