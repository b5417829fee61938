class Inline: """Docstring on the same line."""


class Concatenated:
    "First part " "second part."


class FString:
    f"""Not a docstring because it is an f-string."""


class Bytes:
    b"""Not a docstring either."""


class Expression:
    "Not a docstring" + "because it is an expression"


class Commented:
    # a comment comes first
    """Still the docstring."""


class Escaped:
    """Quotes \"\"\" inside and a tab\there."""
