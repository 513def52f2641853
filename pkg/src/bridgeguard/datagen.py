"""Synthetic bridge-registration datasets: generation, CSV I/O, encoding.

The original capture behind this feature schema was never published, so the
generator stands in for it: six categorical features plus a Yes/No label,
with `api_name` the strongly predictive field and the rest carrying only a
weak, documented correlation.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .catalog import DEFAULT_SENSITIVE_APIS

__all__ = [
    "FEATURES",
    "CSV_HEADER",
    "Sample",
    "Dataset",
    "GeneratorVocab",
    "Encoder",
    "EncodedDataset",
    "generate",
    "read_csv",
    "write_csv",
    "fit_encoder",
    "encode",
]

FEATURES = ("app_name", "permissions", "api_name", "website_name", "ip", "location")
CSV_HEADER = FEATURES + ("label",)
LABELS = ("Yes", "No")

# Probability that a weakly-correlated field draws from the sub-pool that
# matches the sample's (pre-noise) class.  0.5 means no correlation.  Kept
# small so api_name dominates every feature ranking by a wide margin.
FIELD_WEIGHTS = {
    "website_name": 0.58,
    "permissions": 0.56,
    "location": 0.55,
    "ip": 0.54,
    "app_name": 0.50,
}


class ConfigError(ValueError):
    """Generator vocabulary too small or arguments out of range."""


class ParseError(ValueError):
    """CSV input violates the dataset schema; carries the offending row."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


@dataclass(frozen=True)
class Sample:
    """One registration record: six categorical features plus a label.

    `label` is None only for feature rows extracted live from an event that
    has not been classified yet; datasets always carry labels.
    """

    app_name: str
    permissions: str
    api_name: str
    website_name: str
    ip: str
    location: str
    label: str | None = None

    def __post_init__(self) -> None:
        for name in FEATURES:
            if not getattr(self, name):
                raise ParseError(f"feature {name!r} is empty")
        if self.label is not None and self.label not in LABELS:
            raise ParseError(f"label must be Yes or No, got {self.label!r}")

    def features(self) -> tuple[str, ...]:
        return tuple(getattr(self, name) for name in FEATURES)


@dataclass
class Dataset:
    samples: list[Sample]
    seed: int | None = None
    provenance: str = "loaded"

    def __len__(self) -> int:
        return len(self.samples)

    def labels(self) -> list[str]:
        return [s.label for s in self.samples]

    def class_counts(self) -> dict[str, int]:
        counts = {"Yes": 0, "No": 0}
        for s in self.samples:
            counts[s.label] += 1
        return counts


# --- generator vocabulary -------------------------------------------------

_DEFAULT_APP_NAMES = [
    "ChatLite", "WeatherNow", "NewsPulse", "FitTrack", "ShopSmart",
    "TravelMate", "PhotoBox", "MusicStreamr", "RecipeJar", "TaskHive",
    "BankEase", "GameZone", "NoteKeeper", "MapQuestor", "VideoLoop",
    "BookShelfy", "CoinWatch", "PetPal", "EduQuiz", "RadioWave",
]

# Hostile page patterns: hostnames a lured WebView ends up loading.
_DEFAULT_ATTACK_SITES = [
    "free-prizes.win", "update-flash-now.top", "secure-login-verify.xyz",
    "wallet-sync.club", "account-alert.icu", "gift-card-claim.online",
    "video-player-codec.site", "battery-saver-pro.space", "sms-premium.click",
    "bank-confirm.info", "device-cleaner.pw", "photo-backup-free.live",
    "vpn-unlock.cam", "reward-center.bar", "system-update.rest",
    "antivirus-scan.loan", "contact-sync.gq",
]

_DEFAULT_BENIGN_SITES = [
    "dailynews.example.com", "cityweather.net", "recipes-hub.com",
    "opensource-docs.org", "travel-guides.net", "music-charts.com",
    "sports-scores.org", "tech-reviews.net", "movie-times.com",
    "language-learn.org", "fitness-tips.net", "home-decor.com",
    "garden-care.org", "auto-news.net", "finance-briefs.com",
    "science-daily.org", "art-gallery.net", "local-events.com",
    "book-reviews.org", "health-advice.net",
]

_DEFAULT_BENIGN_APIS = [
    "toString", "hashCode", "getVersion", "getLocale", "getTheme",
    "setTitle", "showToast", "log", "openDialog", "closeDialog",
    "getScreenSize", "getFontScale", "isDarkMode", "vibrate",
    "playSound", "stopSound", "getAppName", "getBuildNumber",
    "refreshPage", "scrollToTop", "shareText", "copyToClipboard",
    "getBatteryLevel", "isOnline", "getOrientation", "setOrientation",
    "startAnimation", "stopAnimation", "getCacheSize", "clearCache",
    "getSessionId", "renewSession", "trackEvent", "getABVariant",
    "showBanner", "hideBanner", "requestReview", "openSettings",
    "getTimezoneOffset", "formatCurrency",
]

# 30 fixed addresses, first half attack-leaning, second half benign-leaning.
_DEFAULT_ATTACK_IPS = [f"185.220.{100 + i}.{7 * i + 13}" for i in range(15)]
_DEFAULT_BENIGN_IPS = [f"93.184.{210 + i}.{5 * i + 21}" for i in range(15)]

# 12 country codes; first half attack-leaning.
_DEFAULT_ATTACK_LOCATIONS = ["RU", "CN", "KP", "IR", "NG", "BY"]
_DEFAULT_BENIGN_LOCATIONS = ["US", "DE", "GB", "JP", "FR", "CA"]

# Small fixed set of permission profiles so the feature stays low-cardinality.
_RISKY_PROFILES = [
    "ACCESS_FINE_LOCATION|INTERNET|READ_PHONE_STATE|READ_SMS",
    "GET_ACCOUNTS|INTERNET|READ_CONTACTS|SEND_SMS",
    "ACCESS_COARSE_LOCATION|INTERNET|READ_PHONE_STATE",
    "ACCESS_FINE_LOCATION|GET_ACCOUNTS|INTERNET|RECORD_AUDIO",
]
_PLAIN_PROFILES = [
    "ACCESS_NETWORK_STATE|INTERNET",
    "INTERNET",
    "ACCESS_NETWORK_STATE|CAMERA|INTERNET",
    "INTERNET|WRITE_EXTERNAL_STORAGE",
]


@dataclass(frozen=True)
class GeneratorVocab:
    """Pools the generator draws from.  Loadable from a JSON key/value file."""

    app_names: tuple[str, ...] = tuple(_DEFAULT_APP_NAMES)
    attack_sites: tuple[str, ...] = tuple(_DEFAULT_ATTACK_SITES)
    benign_sites: tuple[str, ...] = tuple(_DEFAULT_BENIGN_SITES)
    sensitive_apis: tuple[str, ...] = tuple(sorted(DEFAULT_SENSITIVE_APIS))
    benign_apis: tuple[str, ...] = tuple(_DEFAULT_BENIGN_APIS)
    attack_ips: tuple[str, ...] = tuple(_DEFAULT_ATTACK_IPS)
    benign_ips: tuple[str, ...] = tuple(_DEFAULT_BENIGN_IPS)
    attack_locations: tuple[str, ...] = tuple(_DEFAULT_ATTACK_LOCATIONS)
    benign_locations: tuple[str, ...] = tuple(_DEFAULT_BENIGN_LOCATIONS)
    risky_permissions: tuple[str, ...] = tuple(_RISKY_PROFILES)
    plain_permissions: tuple[str, ...] = tuple(_PLAIN_PROFILES)

    def validate(self) -> None:
        if len(self.app_names) < 20:
            raise ConfigError(f"need >= 20 app names, got {len(self.app_names)}")
        if len(self.attack_sites) < 17:
            raise ConfigError(
                f"need >= 17 attack site patterns, got {len(self.attack_sites)}"
            )
        for name in ("benign_sites", "sensitive_apis", "benign_apis", "attack_ips",
                     "benign_ips", "attack_locations", "benign_locations",
                     "risky_permissions", "plain_permissions"):
            if not getattr(self, name):
                raise ConfigError(f"vocab pool {name!r} is empty")

    @classmethod
    def from_file(cls, path) -> "GeneratorVocab":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in dc_fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown vocab keys: {sorted(unknown)}")
        return cls(**{k: tuple(v) for k, v in raw.items()})


def _pick(rng: random.Random, matching, other, weight: float) -> str:
    pool = matching if rng.random() < weight else other
    return rng.choice(pool)


def generate(
    n: int,
    attack_ratio: float = 0.5,
    noise: float = 0.05,
    seed: int = 42,
    vocab: GeneratorVocab | None = None,
) -> Dataset:
    """Generate `n` samples with exactly round(n * attack_ratio) labelled Yes.

    Every Yes sample draws api_name from the sensitive pool and every No from
    the benign pool; afterwards round(n * noise / 2) labels per class are
    flipped (balanced, so class counts are preserved exactly).  Flipped rows
    keep the features of their original class, which caps attainable accuracy
    at roughly 1 - noise.  Output is fully determined by `seed`.
    """
    if n < 0:
        raise ConfigError("n must be >= 0")
    if not 0.0 <= attack_ratio <= 1.0:
        raise ConfigError("attack_ratio must be in [0, 1]")
    if not 0.0 <= noise <= 0.5:
        raise ConfigError("noise must be in [0, 0.5]")
    vocab = vocab or GeneratorVocab()
    vocab.validate()

    rng = random.Random(seed)
    n_yes = round(n * attack_ratio)
    rows: list[tuple[str, dict]] = []
    for i in range(n):
        true_label = "Yes" if i < n_yes else "No"
        attack = true_label == "Yes"
        feats = {
            "app_name": rng.choice(vocab.app_names),
            "permissions": _pick(
                rng,
                vocab.risky_permissions if attack else vocab.plain_permissions,
                vocab.plain_permissions if attack else vocab.risky_permissions,
                FIELD_WEIGHTS["permissions"],
            ),
            "api_name": rng.choice(
                vocab.sensitive_apis if attack else vocab.benign_apis
            ),
            "website_name": _pick(
                rng,
                vocab.attack_sites if attack else vocab.benign_sites,
                vocab.benign_sites if attack else vocab.attack_sites,
                FIELD_WEIGHTS["website_name"],
            ),
            "ip": _pick(
                rng,
                vocab.attack_ips if attack else vocab.benign_ips,
                vocab.benign_ips if attack else vocab.attack_ips,
                FIELD_WEIGHTS["ip"],
            ),
            "location": _pick(
                rng,
                vocab.attack_locations if attack else vocab.benign_locations,
                vocab.benign_locations if attack else vocab.attack_locations,
                FIELD_WEIGHTS["location"],
            ),
        }
        rows.append((true_label, feats))

    # balanced label flips: same count each way keeps |Yes| exact
    flips_per_class = round(n * noise / 2)
    yes_idx = list(range(n_yes))
    no_idx = list(range(n_yes, n))
    flipped = set(rng.sample(yes_idx, min(flips_per_class, len(yes_idx))))
    flipped |= set(rng.sample(no_idx, min(flips_per_class, len(no_idx))))

    samples = []
    for i, (true_label, feats) in enumerate(rows):
        label = true_label
        if i in flipped:
            label = "No" if label == "Yes" else "Yes"
        samples.append(Sample(label=label, **feats))
    rng.shuffle(samples)
    return Dataset(samples=samples, seed=seed, provenance="generated")


# --- CSV I/O ----------------------------------------------------------------


def write_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for s in dataset.samples:
            writer.writerow(s.features() + (s.label,))


def read_csv(path) -> Dataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty, expected a header row") from None
        if tuple(header) != CSV_HEADER:
            missing = [c for c in CSV_HEADER if c not in header]
            if missing:
                raise ParseError(f"missing column(s) {missing}, header was {header}")
            raise ParseError(f"header {header} != expected {list(CSV_HEADER)}")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise ParseError(
                    f"expected {len(CSV_HEADER)} fields, got {len(row)}", row=lineno
                )
            rec = dict(zip(CSV_HEADER, row))
            for col, value in rec.items():
                if value == "":
                    raise ParseError(f"empty field {col!r}", row=lineno)
            if rec["label"] not in LABELS:
                raise ParseError(f"bad label token {rec['label']!r}", row=lineno)
            samples.append(Sample(**rec))
    return Dataset(samples=samples, seed=None, provenance="loaded")


# --- nominal -> numerical encoding -------------------------------------------


@dataclass(frozen=True)
class Encoder:
    """One-hot layout fitted on a training set.

    Each feature owns a contiguous block of len(categories) + 1 columns; the
    final column of the block is reserved for categories unseen at fit time,
    so any row encodes to exactly one hot bit per feature.
    """

    column_map: dict[tuple[str, str], int]
    blocks: dict[str, tuple[int, int]]  # feature -> (start, width)
    width: int

    def unseen_column(self, feature: str) -> int:
        start, width = self.blocks[feature]
        return start + width - 1

    def encode_row(self, sample: Sample) -> np.ndarray:
        row = np.zeros(self.width)
        for name in FEATURES:
            col = self.column_map.get((name, getattr(sample, name)))
            if col is None:
                col = self.unseen_column(name)
            row[col] = 1.0
        return row


@dataclass
class EncodedDataset:
    matrix: np.ndarray  # (n, width) one-hot blocks
    column_map: dict[tuple[str, str], int]
    labels: np.ndarray  # (n,), Yes -> 1, No -> 0


def fit_encoder(train: Dataset) -> Encoder:
    if not train.samples:
        raise ConfigError("cannot fit an encoder on an empty dataset")
    column_map: dict[tuple[str, str], int] = {}
    blocks: dict[str, tuple[int, int]] = {}
    col = 0
    for name in FEATURES:
        cats = sorted({getattr(s, name) for s in train.samples})
        start = col
        for cat in cats:
            column_map[(name, cat)] = col
            col += 1
        col += 1  # reserved unseen column
        blocks[name] = (start, col - start)
    return Encoder(column_map=column_map, blocks=blocks, width=col)


def encode(enc: Encoder, dataset: Dataset) -> EncodedDataset:
    matrix = np.zeros((len(dataset.samples), enc.width))
    labels = np.zeros(len(dataset.samples), dtype=np.int64)
    for i, s in enumerate(dataset.samples):
        matrix[i] = enc.encode_row(s)
        labels[i] = 1 if s.label == "Yes" else 0
    return EncodedDataset(matrix=matrix, column_map=enc.column_map, labels=labels)
