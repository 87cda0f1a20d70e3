"""Batch CLI: run a deliberation, replay a recorded transcript, serve HTTP.

Exit codes: 0 on Delivered, 1 on Failed, 2 on usage errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .argmap import map_to_json
from .config import AppConfig
from .export import render_dot, render_protocol, render_svg
from .gateway import ScriptedGateway, transcript_to_script
from .guide import GuideConfig, GuideSession, SessionState, run_pros_cons_guide, run_suspension_guide


@click.group()
def main() -> None:
    """Guided deliberation over pros and cons."""


def _write_outputs(
    session: GuideSession, out_dir: Path, transcript: dict
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "answer.txt").write_text((session.answer or "") + "\n", encoding="utf-8")
    (out_dir / "protocol.txt").write_text(
        render_protocol(session.protocol) + "\n", encoding="utf-8"
    )
    if session.map is not None:
        (out_dir / "map.svg").write_text(render_svg(session.map), encoding="utf-8")
        (out_dir / "map.dot").write_text(render_dot(session.map), encoding="utf-8")
        (out_dir / "map.json").write_text(map_to_json(session.map), encoding="utf-8")
    (out_dir / "transcript.json").write_text(
        json.dumps(transcript, indent=1), encoding="utf-8"
    )


def _run_guide(
    problem: str,
    guide: str,
    guide_cfg: GuideConfig,
    client,
    expert,
) -> GuideSession:
    if guide == "suspension":
        return run_suspension_guide(
            problem, client, expert, n_paraphrases=guide_cfg.n_paraphrases, cfg=guide_cfg
        )
    return run_pros_cons_guide(problem, client, expert, guide_cfg)


def _transcript_doc(
    problem: str, guide: str, guide_cfg: GuideConfig, client, expert
) -> dict:
    return {
        "problem": problem,
        "guide": guide,
        "config": {
            "branching_threshold": guide_cfg.branching_threshold,
            "allow_root_root_edges": guide_cfg.allow_root_root_edges,
            "n_paraphrases": guide_cfg.n_paraphrases,
            "temperature": guide_cfg.temperature,
        },
        "client": client.transcript,
        "expert": expert.transcript,
    }


def _finish(session: GuideSession) -> None:
    if session.state is SessionState.DELIVERED:
        click.echo(f"Delivered session {session.id}")
        sys.exit(0)
    failure = session.failure
    detail = f" at stage {failure.stage.value}: {failure.cause}" if failure else ""
    click.echo(f"Failed session {session.id}{detail}", err=True)
    sys.exit(1)


@main.command()
@click.option(
    "--problem-file",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Text file holding the problem statement.",
)
@click.option(
    "--guide",
    type=click.Choice(["pros_cons", "suspension"]),
    default="pros_cons",
    show_default=True,
)
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON config naming client/expert endpoints or script files.",
)
@click.option(
    "--out-dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Where answer.txt, protocol.txt, map.*, transcript.json are written.",
)
def run(problem_file: Path, guide: str, config_path: Path, out_dir: Path) -> None:
    """Run one deliberation and write all artifacts."""
    problem = problem_file.read_text(encoding="utf-8").strip()
    if not problem:
        raise click.UsageError(f"problem file {problem_file} is empty")
    config = AppConfig.load(config_path)
    guide_cfg = config.guide_config()
    client, expert = config.build_gateways()
    session = _run_guide(problem, guide, guide_cfg, client, expert)
    _write_outputs(
        session, out_dir, _transcript_doc(problem, guide, guide_cfg, client, expert)
    )
    _finish(session)


@main.command()
@click.option(
    "--transcript",
    "transcript_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="transcript.json written by a previous run.",
)
@click.option(
    "--out-dir",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
)
def replay(transcript_path: Path, out_dir: Path) -> None:
    """Re-run a recorded session deterministically from its transcript."""
    doc = json.loads(transcript_path.read_text(encoding="utf-8"))
    cfg_doc = doc.get("config", {})
    guide_cfg = GuideConfig(
        branching_threshold=cfg_doc.get("branching_threshold", 0.5),
        allow_root_root_edges=cfg_doc.get("allow_root_root_edges", False),
        n_paraphrases=cfg_doc.get("n_paraphrases", 3),
        temperature=cfg_doc.get("temperature", 0.6),
    )
    client = ScriptedGateway(transcript_to_script(doc["client"]), name="client")
    expert = ScriptedGateway(transcript_to_script(doc["expert"]), name="expert")
    session = _run_guide(doc["problem"], doc.get("guide", "pros_cons"), guide_cfg, client, expert)
    _write_outputs(
        session,
        out_dir,
        _transcript_doc(doc["problem"], doc.get("guide", "pros_cons"), guide_cfg, client, expert),
    )
    _finish(session)


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8718, show_default=True, type=int)
@click.option(
    "--ui-dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=None,
    help="Serve a built chat UI (frontend/ with dist/) at the root path.",
)
def serve(config_path: Path, host: str, port: int, ui_dir: Path | None) -> None:
    """Serve the session HTTP API (consumed by the chat UI)."""
    import uvicorn
    from starlette.staticfiles import StaticFiles

    from .service import create_app

    app = create_app(AppConfig.load(config_path))
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
