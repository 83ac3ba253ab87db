"""`ca` command-line interface.

Exit codes: 0 success, 1 data/validation/provider failure, 2 usage error
(click's own convention for bad arguments).
"""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path

import click

from . import accelerator, nlu, sampledata
from .accelerator import StagingStore
from .engine import Engine
from .errors import DialogKitError, EmptyUtterance, ValidationError
from .gateway import AuditLog, Gateway
from .project import load_project, save_project, validate
from .providers import ProviderConfig, make_provider


def _default_fixtures() -> str:
    return str(resources.files("dialogkit") / "data" / "banking_fixtures.yaml")


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load(ctx: click.Context):
    try:
        return load_project(ctx.obj["project"])
    except ValidationError as exc:
        for violation in exc.violations:
            click.echo(f"invalid: {violation}", err=True)
        sys.exit(1)
    except DialogKitError as exc:
        _fail(str(exc))


def _gateway(ctx: click.Context, config) -> Gateway:
    provider_kind = ctx.obj["provider"]
    if provider_kind == "mock":
        provider_config = ProviderConfig(
            kind="mock",
            fixtures_path=ctx.obj["fixtures"] or _default_fixtures(),
            mock_mode=ctx.obj["mock_mode"],
        )
    else:
        provider_config = ProviderConfig(
            kind="http_openai_compatible",
            endpoint=ctx.obj["endpoint"],
            model=ctx.obj["model"],
        )
    system_message = ""
    if config is not None and config.persona.traits:
        system_message = (
            f"You are {config.persona.role_description} "
            f"Traits: {', '.join(config.persona.traits)}."
        )
    try:
        provider = make_provider(provider_config, system_message=system_message)
    except DialogKitError as exc:
        _fail(str(exc))
    audit_path = ctx.obj["audit_log"]
    return Gateway(provider, audit_log=AuditLog(audit_path) if audit_path else None)


@click.group()
@click.option("--project", default="project", show_default=True,
              help="Project directory.")
@click.option("--provider", default="mock", show_default=True,
              type=click.Choice(["mock", "http"]))
@click.option("--fixtures", default="", help="Mock fixtures YAML path.")
@click.option("--mock-mode", default="strict", show_default=True,
              type=click.Choice(["strict", "echo"]))
@click.option("--endpoint", default="", help="HTTP provider base URL.")
@click.option("--model", default="gpt-4", show_default=True)
@click.option("--audit-log", default="", help="JSONL audit log path.")
@click.pass_context
def main(ctx, project, provider, fixtures, mock_mode, endpoint, model, audit_log):
    """Pipeline conversational-agent toolkit."""
    ctx.ensure_object(dict)
    ctx.obj.update(
        project=project, provider=provider, fixtures=fixtures,
        mock_mode=mock_mode, endpoint=endpoint, model=model,
        audit_log=audit_log,
    )


@main.command()
@click.pass_context
def init(ctx):
    """Write the bundled private-banking sample project."""
    target = Path(ctx.obj["project"])
    if (target / "project.yaml").exists():
        _fail(f"{target} already contains a project")
    save_project(sampledata.build_banking_project(), target)
    click.echo(f"project written to {target}")


@main.command(name="validate")
@click.pass_context
def validate_cmd(ctx):
    """Load the project and report every validation violation."""
    config = _load(ctx)
    violations = validate(config)
    if violations:
        for violation in violations:
            click.echo(f"invalid: {violation}", err=True)
        sys.exit(1)
    click.echo("project is valid")


@main.command()
@click.pass_context
def train(ctx):
    """Train the intent model and report corpus statistics."""
    config = _load(ctx)
    try:
        model = nlu.train(config)
    except DialogKitError as exc:
        _fail(str(exc))
    counts = {}
    for label, _, _ in model.example_vectors:
        counts[label] = counts.get(label, 0) + 1
    click.echo(f"trained on {model.total_examples} examples, "
               f"{len(counts)} intents, vocabulary {len(model.vocabulary)}")
    for intent, count in sorted(counts.items()):
        click.echo(f"  {intent}: {count}")


@main.command()
@click.option("--locale", default="", help="Response locale (BCP-47).")
@click.option("--persona", default=None, help="Response persona.")
@click.option("--debug", "show_debug", is_flag=True)
@click.pass_context
def chat(ctx, locale, persona, show_debug):
    """Interactive REPL against the local engine."""
    config = _load(ctx)
    gateway = _gateway(ctx, config)
    engine = Engine(config, gateway, locale=locale, persona=persona)
    state = engine.new_session()
    click.echo("session started; /quit to exit")
    while True:
        try:
            text = click.prompt("you", prompt_suffix="> ")
        except (EOFError, click.Abort):
            break
        if text.strip() in ("/quit", "/exit"):
            break
        try:
            result = engine.handle_turn(state, text)
        except EmptyUtterance:
            continue
        for reply in result.replies:
            click.echo(f"bot> {reply}")
        if show_debug:
            click.echo(json.dumps(result.debug, indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8710, show_default=True)
@click.option("--data-dir", default="data", show_default=True)
@click.option("--ui-origin", default="http://localhost:5173", show_default=True)
@click.option("--locale", default="", help="Response locale (BCP-47).")
@click.option("--persona", default=None, help="Response persona.")
@click.pass_context
def serve(ctx, host, port, data_dir, ui_origin, locale, persona):
    """Run the HTTP API."""
    from .service import serve as run_service

    config = _load(ctx)
    gateway = _gateway(ctx, config)
    engine = Engine(config, gateway, locale=locale, persona=persona)
    run_service(engine, data_dir, host=host, port=port, ui_origin=ui_origin)


@main.group()
def gen():
    """LLM-assisted authoring; everything lands in staging for review."""


def _gen_context(ctx):
    config = _load(ctx)
    gateway = _gateway(ctx, config)
    staging = StagingStore(ctx.obj["project"])
    return config, gateway, staging


def _echo_staged(staged) -> None:
    if not staged:
        click.echo("nothing new staged")
        return
    for item in staged:
        click.echo(f"staged {item.kind} {item.id}: {item.content}")


@gen.command()
@click.option("--domain", required=True)
@click.option("-n", "count", default=5, show_default=True)
@click.pass_context
def intents(ctx, domain, count):
    config, gateway, staging = _gen_context(ctx)
    try:
        _echo_staged(accelerator.gen_intents(config, gateway, staging, domain, count))
    except DialogKitError as exc:
        _fail(str(exc))


@gen.command()
@click.option("--intent", "intent_name", required=True)
@click.option("-n", "count", default=10, show_default=True)
@click.option("--constraints", default="")
@click.pass_context
def utterances(ctx, intent_name, count, constraints):
    config, gateway, staging = _gen_context(ctx)
    try:
        _echo_staged(accelerator.gen_utterances(
            config, gateway, staging, intent_name, count, constraints))
    except DialogKitError as exc:
        _fail(str(exc))


@gen.command()
@click.option("--domain", required=True)
@click.pass_context
def entities(ctx, domain):
    config, gateway, staging = _gen_context(ctx)
    try:
        _echo_staged(accelerator.gen_entities(config, gateway, staging, domain))
    except DialogKitError as exc:
        _fail(str(exc))


@gen.command()
@click.option("--entity", "entity_name", required=True)
@click.option("--canonical", required=True)
@click.option("--domain", default="private banking", show_default=True)
@click.pass_context
def synonyms(ctx, entity_name, canonical, domain):
    config, gateway, staging = _gen_context(ctx)
    try:
        staged, withheld = accelerator.gen_synonyms(
            config, gateway, staging, entity_name, canonical, domain)
    except DialogKitError as exc:
        _fail(str(exc))
    _echo_staged(staged)
    for term in withheld:
        click.echo(f"withheld (collides with another value): {term}")


@gen.command()
@click.option("--role", required=True)
@click.pass_context
def persona(ctx, role):
    config, gateway, staging = _gen_context(ctx)
    try:
        _echo_staged(accelerator.gen_persona(config, gateway, staging, role))
    except DialogKitError as exc:
        _fail(str(exc))


@gen.command()
@click.option("--template", "templates", multiple=True, required=True)
@click.option("--locale", "locales", multiple=True, required=True)
@click.pass_context
def localize(ctx, templates, locales):
    config, gateway, staging = _gen_context(ctx)
    try:
        _echo_staged(accelerator.localize(
            config, gateway, staging, list(templates), list(locales)))
    except (DialogKitError, ValueError) as exc:
        _fail(str(exc))


@main.group()
def review():
    """Approve or reject staged generated content."""


@review.command(name="list")
@click.pass_context
def review_list(ctx):
    staging = StagingStore(ctx.obj["project"])
    pending = staging.pending()
    if not pending:
        click.echo("no pending items")
        return
    for item in pending:
        target = " ".join(f"{k}={v}" for k, v in item.target.items())
        click.echo(f"{item.id}  {item.kind:22s} {target:30s} {item.content}")


@review.command()
@click.argument("item_ids", nargs=-1, required=True)
@click.pass_context
def approve(ctx, item_ids):
    config = _load(ctx)
    staging = StagingStore(ctx.obj["project"])
    try:
        accelerator.review_approve(config, staging, ctx.obj["project"],
                                   list(item_ids))
    except ValidationError as exc:
        for violation in exc.violations:
            click.echo(f"invalid after merge: {violation}", err=True)
        sys.exit(1)
    except DialogKitError as exc:
        _fail(str(exc))
    click.echo(f"approved {len(item_ids)} item(s)")


@review.command()
@click.argument("item_ids", nargs=-1, required=True)
@click.pass_context
def reject(ctx, item_ids):
    staging = StagingStore(ctx.obj["project"])
    try:
        accelerator.review_reject(staging, list(item_ids))
    except DialogKitError as exc:
        _fail(str(exc))
    click.echo(f"rejected {len(item_ids)} item(s)")


if __name__ == "__main__":
    main()
