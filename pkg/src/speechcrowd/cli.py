"""Command-line entry points: run the service, prepare the store, and the
operational commands (stats, export, backfill-qa, gc-blobs)."""

from __future__ import annotations

import json
import secrets
import sys
from datetime import datetime, timezone

import click

from . import __version__
from .domain import DialectTag, Role, SubmissionState, parse_timestamp
from .export import NonEmptyOutput, export_dataset, key_fingerprint
from .maintenance import backfill_qa as run_backfill
from .maintenance import gc_blobs as run_gc
from .service import ConfigError, build_repository, default_asr_client, load_config
from .service.security import MIN_PASSWORD_LENGTH, hash_password
from .stats import BadRange, compute_stats
from .store import EmailTaken

RANGE_MIN = datetime(1970, 1, 1, tzinfo=timezone.utc)
RANGE_MAX = datetime(9999, 1, 1, tzinfo=timezone.utc)


def _parse_cli_timestamp(value: str) -> datetime:
    try:
        return parse_timestamp(value)
    except ValueError:
        pass
    parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def _load(config_path: str | None):
    try:
        return load_config(config_path)
    except (ConfigError, OSError) as exc:
        raise click.ClickException(f"config: {exc}")


config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    envvar="SPEECHCROWD_CONFIG",
    help="YAML configuration file; SPEECHCROWD_* env vars override it.",
)


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Crowdsourced dialect-tagged speech collection platform."""


@main.command()
@config_option
@click.option("--host", default=None, help="Override the configured listen host.")
@click.option("--port", default=None, type=int, help="Override the configured listen port.")
def serve(config_path: str | None, host: str | None, port: int | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = _load(config_path)
    app = create_app(config)
    uvicorn.run(
        app,
        host=host if host is not None else config.listen_host,
        port=port if port is not None else config.listen_port,
    )


@main.command()
@config_option
def migrate(config_path: str | None) -> None:
    """Create or upgrade the database schema."""
    config = _load(config_path)
    repo = build_repository(config)
    applied = repo.db.applied_migrations()
    click.echo(f"schema up to date ({len(applied)} migrations applied)")


@main.command("bootstrap-admin")
@config_option
@click.option("--email", required=True)
@click.option("--password", required=True)
@click.option("--handle", default=None, help="Display name; defaults to the email local part.")
def bootstrap_admin(
    config_path: str | None, email: str, password: str, handle: str | None
) -> None:
    """Create the first administrator account."""
    if len(password) < MIN_PASSWORD_LENGTH:
        raise click.ClickException(
            f"password must be at least {MIN_PASSWORD_LENGTH} characters"
        )
    config = _load(config_path)
    repo = build_repository(config)
    handle = handle or email.split("@", 1)[0]
    try:
        user = repo.create_user(
            handle,
            email,
            hash_password(password),
            roles=(Role.CONTRIBUTOR, Role.ANNOTATOR, Role.ADMIN),
        )
    except EmailTaken:
        raise click.ClickException(f"an account already uses {email}")
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"admin created: {user.user_id} ({user.email})")


@main.command()
@config_option
@click.option("--from", "from_ts", default=None, help="Range start (ISO-8601, inclusive).")
@click.option("--to", "to_ts", default=None, help="Range end (ISO-8601, exclusive).")
@click.option("--per-user", is_flag=True, help="Include the per-user breakdown.")
def stats(config_path: str | None, from_ts: str | None, to_ts: str | None, per_user: bool) -> None:
    """Print aggregate statistics as JSON."""
    config = _load(config_path)
    repo = build_repository(config)
    try:
        start = _parse_cli_timestamp(from_ts) if from_ts else RANGE_MIN
        end = _parse_cli_timestamp(to_ts) if to_ts else RANGE_MAX
        snapshot = compute_stats(repo, start, end, include_per_user=per_user)
    except (BadRange, ValueError) as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(snapshot.to_dict(), ensure_ascii=False, indent=2))


@main.command()
@config_option
@click.argument("output_dir", type=click.Path(file_okay=False))
@click.option("--task", "task_id", default=None, help="Only this task's submissions.")
@click.option("--dialect", default=None, help="Only this dialect (CC or CC:City).")
@click.option(
    "--release-key",
    default=None,
    envvar="SPEECHCROWD_RELEASE_KEY",
    help="Secret key for speaker pseudonyms; pass the same key to reproduce a release.",
)
def export(
    config_path: str | None,
    output_dir: str,
    task_id: str | None,
    dialect: str | None,
    release_key: str | None,
) -> None:
    """Write accepted recordings plus manifest.jsonl to OUTPUT_DIR."""
    config = _load(config_path)
    repo = build_repository(config)
    tag = None
    if dialect is not None:
        try:
            tag = DialectTag.from_label(dialect)
        except ValueError as exc:
            raise click.ClickException(str(exc))
    if release_key is None:
        key = secrets.token_bytes(32)
        click.echo(
            "no --release-key given; generated a one-off key "
            f"(fingerprint {key_fingerprint(key)}) — reruns will not be byte-identical",
            err=True,
        )
    else:
        key = release_key.encode("utf-8")
    try:
        summary = export_dataset(repo, output_dir, key, task_id=task_id, dialect=tag)
    except NonEmptyOutput as exc:
        raise click.ClickException(f"output directory is not empty: {exc}")
    click.echo(
        json.dumps(
            {
                "records": summary.records,
                "total_hours": summary.total_hours,
                "output_dir": output_dir,
                "key_fingerprint": key_fingerprint(key),
            },
            indent=2,
        )
    )


@main.command("backfill-qa")
@config_option
@click.option(
    "--states",
    default="recorded,qa_passed,qa_failed",
    show_default=True,
    help="Comma-separated submission states to rescore.",
)
def backfill_qa(config_path: str | None, states: str) -> None:
    """Re-run the quality pipeline over stored submissions."""
    config = _load(config_path)
    repo = build_repository(config)
    try:
        wanted = [SubmissionState(s.strip()) for s in states.split(",") if s.strip()]
    except ValueError as exc:
        raise click.ClickException(str(exc))
    result = run_backfill(
        repo,
        default_asr_client(config),
        wanted,
        params=config.vad,
        thresholds=config.qa,
    )
    click.echo(f"rescored {result.rescored}, failed {result.failed}")
    if result.failed:
        sys.exit(1)


@main.command("gc-blobs")
@config_option
def gc_blobs(config_path: str | None) -> None:
    """Delete audio files no longer referenced by any non-deleted submission."""
    config = _load(config_path)
    repo = build_repository(config)
    removed = run_gc(repo)
    click.echo(f"removed {removed} unreferenced blobs")


if __name__ == "__main__":
    main()
