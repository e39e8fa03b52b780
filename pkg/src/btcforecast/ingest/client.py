"""HTTP fetching and the fixed-cadence poll loop."""

from __future__ import annotations

import json
import logging
import threading
import urllib.error
import urllib.request

from .recordlog import OutOfOrderError, RecordLog
from .sources import SchemaError, SourceConfig, parse_payload

log = logging.getLogger(__name__)

_TIMEOUT_S = 10.0


class FetchError(RuntimeError):
    """Network-level failure; retryable on the next scheduled poll."""


def fetch_once(config: SourceConfig):
    """One HTTP GET against the source, parsed into a full record.

    Network problems raise FetchError; payloads that do not satisfy the
    schema raise SchemaError naming the field.
    """
    try:
        with urllib.request.urlopen(config.base_url, timeout=_TIMEOUT_S) as resp:
            body = resp.read()
    except (urllib.error.URLError, OSError) as e:
        raise FetchError(f"{config.name}: {e}") from e
    try:
        payload = json.loads(body)
    except (ValueError, UnicodeDecodeError) as e:
        raise FetchError(f"{config.name}: malformed response body: {e}") from e
    if not isinstance(payload, dict):
        raise FetchError(f"{config.name}: expected a JSON object")
    return parse_payload(config.schema, payload)


def poll(
    config: SourceConfig,
    sink: RecordLog,
    stop: threading.Event,
    max_polls: int | None = None,
) -> int:
    """Fetch once per poll_interval and append to the sink until stopped.

    Fetch and schema failures (and out-of-order duplicates) are logged and
    skipped; the loop never breaks on them. Sink write failures are fatal.
    Returns the number of records successfully appended.
    """
    appended = 0
    polls = 0
    while not stop.is_set():
        if max_polls is not None and polls >= max_polls:
            break
        polls += 1
        try:
            record = fetch_once(config)
        except (FetchError, SchemaError) as e:
            log.warning("poll %s: fetch skipped: %s", config.name, e)
        else:
            try:
                sink.append(record)
                appended += 1
            except OutOfOrderError as e:
                log.warning("poll %s: record dropped: %s", config.name, e)
        if max_polls is not None and polls >= max_polls:
            break
        if stop.wait(config.poll_interval):
            break
    return appended
