"""Content-addressed chaincode source store.

Proposals carry a link to the source (repository URL, commit id, path) rather
than the source itself; agents resolve the link here before packaging. This
store stands in for an external source repository such as Git.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import canonical_bytes


class UnknownSourceError(KeyError):
    """The (url, commit, path) triple does not resolve to a stored package."""


@dataclass(frozen=True)
class SourceRef:
    """Link to one chaincode source snapshot."""

    repository_url: str
    commit_id: str
    path: str

    def key(self) -> tuple[str, str, str]:
        return (self.repository_url, self.commit_id, self.path)

    def to_json(self) -> dict:
        return {
            "repository_url": self.repository_url,
            "commit_id": self.commit_id,
            "path": self.path,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SourceRef":
        return cls(
            repository_url=data["repository_url"],
            commit_id=data["commit_id"],
            path=data["path"],
        )


class RepositoryStore:
    """In-memory map from source references to exact package bytes."""

    def __init__(self) -> None:
        self._packages: dict[tuple[str, str, str], bytes] = {}

    def put(self, ref: SourceRef, package: bytes) -> None:
        self._packages[ref.key()] = bytes(package)

    def resolve(self, ref: SourceRef) -> bytes:
        """Return the exact stored bytes for ``ref``."""
        try:
            return self._packages[ref.key()]
        except KeyError:
            raise UnknownSourceError(f"no package stored for {ref}") from None

    def __contains__(self, ref: SourceRef) -> bool:
        return ref.key() in self._packages


def synthesize_package(name: str, version: str) -> bytes:
    """Deterministic stand-in package bytes for a chaincode build."""
    return canonical_bytes({"chaincode": name, "version": version, "format": "sim-pkg-1"})


def genesis_source_ref(name: str, version: str) -> SourceRef:
    """Conventional source link for chaincodes present since genesis."""
    return SourceRef(
        repository_url=f"https://repo.invalid/{name}",
        commit_id=f"genesis-{version}",
        path=name,
    )
