from pydantic import ValidationError

from mpld.errors import ConfigError


def describe_validation_error(validation_error: ValidationError, subject: str) -> str:
    """Turn a pydantic ValidationError into one readable line per offending field.

    The raw pydantic message repeats the model name and input echo for every
    error; for a command-line user only the field path and reason matter.
    """
    messages = []
    for err in validation_error.errors():
        loc = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
        messages.append(f"{loc}: {err.get('msg', 'invalid value')}")
    unique = list(dict.fromkeys(messages))
    return f"Invalid {subject}: " + "; ".join(unique)


def as_config_error(validation_error: ValidationError, subject: str = "configuration") -> ConfigError:
    return ConfigError(describe_validation_error(validation_error, subject))
