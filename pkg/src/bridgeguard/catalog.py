"""Sensitive-API catalog and the bridge-event domain model.

A *bridge event* is one attempted Java-object registration inside a WebView:
the host app hands a native object to the page, and every native method that
object exposes becomes callable from page JavaScript.  The catalog records
which native APIs leak device data when reached that way.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = [
    "DEFAULT_SENSITIVE_APIS",
    "API_ALIASES",
    "PERMISSION_VOCAB",
    "SensitiveApiCatalog",
    "BridgeEvent",
]

# Built-in catalog of native APIs reachable through a registered Java object
# that expose device data (telephony identifiers, SMS, location, accounts,
# browser history).  Several entries carry nonstandard spellings; those are
# kept verbatim as the canonical strings, and API_ALIASES maps the
# conventional SDK spellings onto them.
DEFAULT_SENSITIVE_APIS = frozenset(
    {
        "getCellLocation",
        "getDeviceId",
        "getPhoneType",
        "getSubscriberId",
        "getLine1Number",
        "getSimSerialNumber",
        "getVoiceMailAlphaTag",
        "getVoiceMailNumber",
        "SendTextMessage",
        "sendMultipleTextMessage",
        "sendDataMessage",
        "getAllProvider",
        "getBestProvider",
        "getGpsStatus",
        "getLastKnownLocation",
        "clearPassword",
        "editProperties",
        "semdMultipartTextMessage",
        "getAccounts",
        "getAuthToken",
        "getUserDate",
        "peekAuthToken",
        "removeAccount",
        "setPassword",
        "getName",
        "getProfileConnectionState",
        "getProfileProxy",
        "getParams",
        "getUnzippedContent",
        "getCertificate",
        "clearHistory",
        "clearSearches",
        "getAllBookMarks",
        "getAllVisitedUrls",
        "getNetworkOperator",
    }
)

# Conventional spelling -> canonical catalog string.  Lookups stay
# case-sensitive; aliases only absorb the known corrected forms.
API_ALIASES: dict[str, str] = {
    "sendTextMessage": "SendTextMessage",
    "sendMultipartTextMessage": "semdMultipartTextMessage",
    "getUserData": "getUserDate",
    "getAllBookmarks": "getAllBookMarks",
}

# Permission tokens an event may declare, pipe-joined and sorted in the
# event's `permissions` field.  Opaque feature tokens, not Android semantics.
PERMISSION_VOCAB = frozenset(
    {
        "INTERNET",
        "ACCESS_NETWORK_STATE",
        "ACCESS_FINE_LOCATION",
        "ACCESS_COARSE_LOCATION",
        "READ_CONTACTS",
        "READ_SMS",
        "SEND_SMS",
        "READ_PHONE_STATE",
        "GET_ACCOUNTS",
        "CAMERA",
        "RECORD_AUDIO",
        "WRITE_EXTERNAL_STORAGE",
    }
)

_HOSTNAME_RE = re.compile(r"^[a-zA-Z0-9]([a-zA-Z0-9\-._]*[a-zA-Z0-9])?$")


class CatalogError(ValueError):
    """Raised for malformed catalog files or invalid bridge events."""


@dataclass(frozen=True)
class SensitiveApiCatalog:
    """Immutable set of sensitive API names plus spelling aliases.

    Safe to share across threads; construction is the only mutation point.
    """

    entries: frozenset[str]
    version: str = "builtin-1"
    aliases: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for alias, target in self.aliases.items():
            if target not in self.entries:
                raise CatalogError(f"alias {alias!r} points at unknown entry {target!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, api: str) -> bool:
        return api in self.entries

    def canonical(self, api: str) -> str | None:
        """Canonical catalog spelling for `api`, or None if not sensitive."""
        if api in self.entries:
            return api
        return self.aliases.get(api)

    def is_sensitive(self, api: str) -> bool:
        return self.canonical(api) is not None

    def sensitive_subset(self, event: "BridgeEvent") -> list[str]:
        """Requested APIs that hit the catalog, original order, deduplicated.

        Returns the spellings as requested (not canonicalized), so callers can
        echo them back to an operator verbatim.
        """
        seen: set[str] = set()
        out: list[str] = []
        for api in event.requested_apis:
            if api not in seen and self.is_sensitive(api):
                seen.add(api)
                out.append(api)
        return out

    @classmethod
    def default(cls) -> "SensitiveApiCatalog":
        return cls(entries=DEFAULT_SENSITIVE_APIS, aliases=dict(API_ALIASES))

    @classmethod
    def from_file(cls, path, version: str | None = None) -> "SensitiveApiCatalog":
        """Load a catalog: one API name per line, `#` starts a comment."""
        names: set[str] = set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                name = line.split("#", 1)[0].strip()
                if name:
                    names.add(name)
        if not names:
            raise CatalogError(f"catalog file {path} contains no API names")
        return cls(entries=frozenset(names), version=version or str(path))


def _check_ip(ip: str) -> None:
    parts = ip.split(".")
    if len(parts) != 4:
        raise CatalogError(f"ip {ip!r} is not a dotted quad")
    for part in parts:
        if not part.isdigit() or not 0 <= int(part) <= 255:
            raise CatalogError(f"ip {ip!r} has octet {part!r} outside 0-255")


@dataclass(frozen=True)
class BridgeEvent:
    """One attempted Java-object registration observed at the bridge.

    A registration exposing several methods is modelled as a single event
    carrying all requested APIs.  `permissions` is the pipe-joined, sorted
    token string; `timestamp` is a monotonic tick, not wall-clock.
    """

    event_id: str
    app_name: str
    object_name: str
    website_name: str
    ip: str
    location: str
    permissions: str
    requested_apis: tuple[str, ...]
    timestamp: int = 0

    def __post_init__(self) -> None:
        # tuple-ify first so list inputs cannot leak mutability
        if not isinstance(self.requested_apis, tuple):
            object.__setattr__(self, "requested_apis", tuple(self.requested_apis))
        if not self.requested_apis:
            raise CatalogError(f"event {self.event_id}: requested_apis is empty")
        _check_ip(self.ip)
        if not _HOSTNAME_RE.match(self.website_name):
            raise CatalogError(
                f"event {self.event_id}: bad website_name {self.website_name!r}"
            )
        tokens = self.permissions.split("|") if self.permissions else []
        unknown = [t for t in tokens if t not in PERMISSION_VOCAB]
        if unknown:
            raise CatalogError(
                f"event {self.event_id}: unknown permission tokens {unknown}"
            )
        if tokens != sorted(tokens):
            raise CatalogError(f"event {self.event_id}: permissions not sorted")

    @staticmethod
    def join_permissions(tokens) -> str:
        """Canonical permissions string: sorted, pipe-joined."""
        return "|".join(sorted(tokens))
