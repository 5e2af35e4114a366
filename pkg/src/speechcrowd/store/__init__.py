from .blobs import BlobError, BlobMissing, BlobStore, IoFailure, StorageFull
from .database import Database
from .repository import (
    PAGE_SIZE,
    CannotReview,
    DuplicateLiveSubmission,
    DuplicatePrompt,
    EmailTaken,
    NotFound,
    Repository,
    StaleState,
    StoreError,
    SubmissionRecord,
    TaskClosed,
    Unauthorized,
    UserBlocked,
)

__all__ = [
    "BlobError",
    "BlobMissing",
    "BlobStore",
    "IoFailure",
    "StorageFull",
    "Database",
    "PAGE_SIZE",
    "CannotReview",
    "DuplicateLiveSubmission",
    "DuplicatePrompt",
    "EmailTaken",
    "NotFound",
    "Repository",
    "StaleState",
    "StoreError",
    "SubmissionRecord",
    "TaskClosed",
    "Unauthorized",
    "UserBlocked",
]
