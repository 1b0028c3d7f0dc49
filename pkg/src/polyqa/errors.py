"""Exception hierarchy shared across the platform."""


class PolyqaError(Exception):
    """Base class for all errors raised by this package."""


# --- dataset layer ---

class MalformedInput(PolyqaError):
    """Structural violation in an input document; carries the path to the node."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class EncodingError(PolyqaError):
    """Input bytes are not valid UTF-8."""


class InvalidDataset(PolyqaError):
    """Dataset failed validation where a valid one is required."""


# --- metrics layer ---

class EmptyGroundTruths(PolyqaError):
    """Scoring requires at least one ground-truth answer."""


class MissingPredictions(PolyqaError):
    """Prediction set does not cover every item in the dataset."""

    def __init__(self, missing_ids):
        self.missing_ids = sorted(missing_ids)
        super().__init__(f"missing predictions for {len(self.missing_ids)} item(s): "
                         + ", ".join(self.missing_ids[:10]))


# --- mixer layer ---

class NoOverlap(PolyqaError):
    """No item id is shared by two or more datasets."""


class LanguagesUnavailable(PolyqaError):
    """A requested mix language is absent from the aligned corpus."""


# --- extractor layer ---

class DegenerateWindow(PolyqaError):
    """Chunking requires window > stride > 0."""


class EndpointUnreachable(PolyqaError):
    """Remote extractor endpoint could not be reached."""


class ExtractionTimeout(PolyqaError):
    """Remote extractor did not answer within the configured timeout."""


class ProtocolViolation(PolyqaError):
    """Remote extractor response violates the wire contract."""


# --- ingestion layer ---

class FetchFailed(PolyqaError):
    """URL fetch failed (network error or non-success status)."""

    def __init__(self, url: str, reason: str, status: int | None = None):
        self.url = url
        self.status = status
        super().__init__(f"fetch failed for {url}: {reason}")


class TooLarge(PolyqaError):
    """Fetched body exceeds the configured size cap."""


class UnsupportedScheme(PolyqaError):
    """Only http, https and file URLs are fetchable."""


# --- dialog layer ---

class EmptyStore(PolyqaError):
    """QA fallback needs at least one knowledge source."""


class AllSourcesFailed(PolyqaError):
    """Extraction failed on every knowledge source."""


class MissingEntities(PolyqaError):
    """Scripted response template references unbound entity slots."""

    def __init__(self, slots):
        self.slots = sorted(slots)
        super().__init__(f"unbound entity slot(s): {', '.join(self.slots)}")


class UnknownTurn(PolyqaError):
    """Feedback references a turn that does not exist."""


# --- reporting layer ---

class MissingCell(PolyqaError):
    """Grid report is missing a (context language, question language) cell."""
