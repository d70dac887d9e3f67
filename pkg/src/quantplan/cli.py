"""Command line entry points.

``serve`` runs the planning service, ``simulate`` runs the federation
experiment harness locally, and the ``client`` group is a thin HTTP client
for a running server (register, interview, profile, plan, feedback, metrics).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .config import AppConfig, load_config
from .sim.experiment import ExperimentConfig, run_experiment
from .sim.report import emit_report


@click.group()
def main() -> None:
    """Quantization planning service and federation simulator."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file (slots, epsilon, strategy, data_dir, LLM settings).")
@click.option("--host", default=None, help="Override listen host.")
@click.option("--port", type=int, default=None, help="Override listen port.")
@click.option("--frontend-dir", type=click.Path(exists=True), default=None,
              help="Serve a built chat frontend (e.g. frontend/) at /ui.")
def serve(config_path: str | None, host: str | None, port: int | None,
          frontend_dir: str | None) -> None:
    """Run the planning server."""
    import uvicorn
    from fastapi.staticfiles import StaticFiles

    from .server import create_app

    config = load_config(config_path) if config_path else AppConfig()
    app = create_app(config)
    if frontend_dir:
        app.mount("/ui", StaticFiles(directory=frontend_dir, html=True), name="ui")
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON experiment config; flags below override it.")
@click.option("--planner", type=click.Choice(["personalized", "unified", "energy_priority"]), default=None)
@click.option("--strategy", type=click.Choice(["fedavg", "class_equal", "majority_centric"]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), default="out",
              help="Directory for report.json and metrics.csv.")
def simulate(config_path: str | None, planner: str | None, strategy: str | None,
             seed: int | None, out_dir: str) -> None:
    """Run one federation experiment and write its report files."""
    data: dict = {}
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    if planner is not None:
        data["planner"] = planner
    if strategy is not None:
        data["strategy"] = strategy
    if seed is not None:
        data["seed"] = seed
    config = ExperimentConfig.from_dict(data)
    report = run_experiment(config)
    report_path, metrics_path = emit_report(report, Path(out_dir))
    click.echo(f"planner={config.planner} strategy={config.strategy} seed={config.seed}")
    click.echo(f"mean_satisfaction={report.mean_satisfaction:.4f} "
               f"mean_relative_energy={report.mean_relative_energy:.4f}")
    click.echo(f"wrote {report_path} and {metrics_path}")


@main.group()
@click.option("--base-url", default="http://127.0.0.1:8000", show_default=True,
              help="Planning server base URL.")
@click.pass_context
def client(ctx: click.Context, base_url: str) -> None:
    """Talk to a running planning server."""
    ctx.obj = base_url.rstrip("/")


def _request(base: str, method: str, path: str, body: dict | None = None) -> dict:
    try:
        response = httpx.request(method, base + path, json=body, timeout=30.0)
    except httpx.HTTPError as exc:
        click.echo(f"request failed: {exc}", err=True)
        sys.exit(1)
    if response.status_code >= 400:
        click.echo(f"server returned {response.status_code}: {response.text}", err=True)
        sys.exit(1)
    return response.json()


@client.command()
@click.option("--hardware-file", type=click.Path(exists=True), required=True,
              help="JSON file with the canonical HardwareSpec encoding.")
@click.pass_obj
def register(base_url: str, hardware_file: str) -> None:
    """Register a client from a hardware spec file."""
    with open(hardware_file, "r", encoding="utf-8") as fh:
        hardware = json.load(fh)
    data = _request(base_url, "POST", "/clients", {"hardware": hardware})
    click.echo(data["client_id"])


@client.command()
@click.argument("client_id")
@click.option("--scenario", type=click.Choice(["initialization", "pre_aggregation", "hardware_change"]),
              default="initialization", show_default=True)
@click.pass_obj
def interview(base_url: str, client_id: str, scenario: str) -> None:
    """Run an interactive interview session in the terminal."""
    data = _request(base_url, "POST", f"/clients/{client_id}/interview", {"scenario": scenario})
    session_id = data["session_id"]
    click.echo(f"agent: {data['agent_message']}")
    done = False
    while not done:
        reply = click.prompt("you")
        data = _request(base_url, "POST", f"/interview/{session_id}/message", {"text": reply})
        click.echo(f"agent: {data['agent_message']}")
        done = data["done"]


@client.command()
@click.argument("client_id")
@click.pass_obj
def profile(base_url: str, client_id: str) -> None:
    """Fetch a client's profile."""
    data = _request(base_url, "GET", f"/clients/{client_id}/profile")
    click.echo(json.dumps(data, indent=2))


@client.command()
@click.option("--round", "round_no", type=int, default=0, show_default=True)
@click.pass_obj
def plan(base_url: str, round_no: int) -> None:
    """Plan one round over the profiled clients."""
    data = _request(base_url, "POST", "/rounds/plan", {"round": round_no})
    click.echo(json.dumps(data, indent=2))


@client.command()
@click.argument("client_id")
@click.option("--round", "round_no", type=int, required=True)
@click.option("--level", required=True)
@click.option("--accuracy", type=float, required=True)
@click.option("--energy", type=float, required=True)
@click.option("--latency", type=float, required=True)
@click.option("--comment", default="")
@click.pass_obj
def feedback(base_url: str, client_id: str, round_no: int, level: str,
             accuracy: float, energy: float, latency: float, comment: str) -> None:
    """Submit per-factor satisfaction ratings for a round."""
    body = {
        "round": round_no,
        "level": level,
        "ratings": {"accuracy": accuracy, "energy": energy, "latency": latency},
        "free_text": comment,
    }
    data = _request(base_url, "POST", f"/clients/{client_id}/feedback", body)
    click.echo(f"case_id={data['case_id']}")


@client.command()
@click.pass_obj
def metrics(base_url: str) -> None:
    """Fetch global model state and satisfaction statistics."""
    data = _request(base_url, "GET", "/metrics")
    click.echo(json.dumps(data, indent=2))


if __name__ == "__main__":
    main()
