"""
CLI for the non-malleable code toolkit.

Every command prints a JSON document with sorted keys on stdout (or a rich
table with ``--pretty``); logs and error panels go to stderr. Randomized
paths take an explicit ``--seed`` and never fall back to an implicit one.

Exit codes: 0 success, 1 usage or parse error, 2 validation failure,
3 certification failure.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from config.settings import Settings
from schemes.amd import AmdError, amd_security_oracle
from schemes.lecss import LecssCode, LecssError, certify_lecss
from schemes.models import AmdParams, LecssParams, parse_probability
from schemes.nm_code import NonMalleableCode, SchemeError
from tools.analysis import AnalysisError, nm_certify
from tools.bounds import epsilon_bound
from tools.gf2 import BitWord, Gf2Error
from tools.lecss_search import LecssSearchError, search_lecss
from tools.tampering import TamperError, TamperFunction, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_CERTIFICATION = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

app = typer.Typer(
    name="nmc",
    help="Non-malleable codes against bitwise and affine tampering.",
    add_completion=False,
    no_args_is_help=True,
)


class CommandFailed(Exception):
    """Carries an exit code and a message up to the command wrapper."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def emit(payload: Dict[str, Any], pretty: bool = False, title: str = "", output: Optional[Path] = None) -> None:
    """Write the report to ``output`` or stdout, as JSON or a rich table."""
    text = dumps(payload)
    if output is not None:
        output.write_text(text + "\n", encoding="utf-8")
        logger.info("Report written to %s", output)
        return
    if pretty:
        console.print(render_table(payload, title))
    else:
        typer.echo(text)


def render_table(payload: Dict[str, Any], title: str = "") -> Table:
    table = Table(title=title or None)
    table.add_column("Field", style="cyan", no_wrap=True)
    table.add_column("Value", style="magenta")
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, dict):
            value = ", ".join(f"{k}={v}" for k, v in sorted(value.items())) or "-"
        elif isinstance(value, list):
            value = ", ".join(str(item) for item in value) or "-"
        table.add_row(key, str(value))
    return table


def handle_error(message: str, code: int) -> None:
    err_console.print(Panel(f"[bold red]{message}", title="Error", border_style="red"))
    raise typer.Exit(code)


def run_command(body: Callable[[], int]) -> None:
    """Map domain errors onto exit codes; the body returns the success exit code."""
    try:
        code = body()
    except CommandFailed as exc:
        handle_error(str(exc), exc.code)
    except (TamperError, SchemeError, AmdError, LecssError) as exc:
        handle_error(str(exc), EXIT_VALIDATION)
    except (ValidationError, json.JSONDecodeError, Gf2Error, AnalysisError, LecssSearchError, OSError) as exc:
        handle_error(str(exc), EXIT_USAGE)
    else:
        if code:
            raise typer.Exit(code)


def load_json(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def load_code(path: Path, settings: Settings) -> NonMalleableCode:
    return NonMalleableCode.from_file(path, settings)


def load_tamper(path: Path) -> TamperFunction:
    return TamperFunction.model_validate(load_json(path))


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")) -> None:
    configure_logging(Settings(), verbose)


@app.command()
def encode(
    params: Path = typer.Argument(..., help="Scheme JSON (amd + lecss sections)"),
    message: str = typer.Argument(..., help="Message as hex"),
    seed: Optional[int] = typer.Option(None, help="Seed for the encoder randomness"),
    x: Optional[int] = typer.Option(None, help="Explicit AMD randomness (field element as int)"),
    r: Optional[str] = typer.Option(None, help="Explicit LECSS randomness as hex"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Encode a message, printing the codeword and the (x, r) used."""

    def body() -> int:
        code = load_code(params, Settings())
        s = _fit(BitWord.from_hex(message), code.k, "message")
        if (x is None) != (r is None):
            raise CommandFailed(EXIT_USAGE, "Pass --x and --r together, or neither")
        if x is not None and r is not None:
            randomness = BitWord.from_hex(r, code.z) if code.z else BitWord(0, 0)
            codeword, used_x, used_r = code.enc(s, x, randomness), x, randomness
        elif seed is None:
            raise CommandFailed(EXIT_USAGE, "encode draws randomness: pass --seed (or both --x and --r)")
        else:
            codeword, used_x, used_r = code.encode_with_seed(s, seed)
        emit({"codeword": codeword.to_hex(), "x": used_x, "r": used_r.to_hex()}, pretty, "Encoding")
        return EXIT_OK

    run_command(body)


@app.command()
def decode(
    params: Path = typer.Argument(..., help="Scheme JSON"),
    codeword: str = typer.Argument(..., help="Codeword as hex"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Decode a codeword; a rejected word prints message null."""

    def body() -> int:
        code = load_code(params, Settings())
        c = _fit(BitWord.from_hex(codeword), code.n, "codeword")
        s = code.dec(c)
        emit({"message": None if s is None else s.to_hex(), "rejected": s is None}, pretty, "Decoding")
        return EXIT_OK

    run_command(body)


@app.command()
def tamper(
    function: Path = typer.Argument(..., help="Tampering function JSON"),
    codeword: str = typer.Argument(..., help="Codeword as hex"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Apply a validated tampering function to a codeword."""

    def body() -> int:
        f = load_tamper(function)
        report = validate(f)
        if not report.ok:
            emit(report.model_dump(mode="json"), pretty, "Validation report")
            raise CommandFailed(
                EXIT_VALIDATION,
                "Invalid tampering function: " + ", ".join(v.check for v in report.violations),
            )
        c = _fit(BitWord.from_hex(codeword), f.n, "codeword")
        emit({"codeword": c.to_hex(), "tampered": f.apply(c).to_hex()}, pretty, "Tampering")
        return EXIT_OK

    run_command(body)


@app.command()
def analyze(
    params: Path = typer.Argument(..., help="Scheme JSON"),
    function: Path = typer.Argument(..., help="Tampering function JSON"),
    mode: str = typer.Option("exact", help="exact or sampled"),
    samples: Optional[int] = typer.Option(None, help="Samples per message in sampled mode"),
    seed: Optional[int] = typer.Option(None, help="Seed, required in sampled mode"),
    workers: Optional[int] = typer.Option(None, help="Worker processes (default NMC_THREADS, capped by it when set)"),
    output: Optional[Path] = typer.Option(None, help="Write the report here instead of stdout"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Certify non-malleability of the scheme against one tampering function."""

    def body() -> int:
        if mode not in ("exact", "sampled"):
            raise CommandFailed(EXIT_USAGE, f"Unknown mode {mode!r}; use exact or sampled")
        if mode == "sampled" and seed is None:
            raise CommandFailed(EXIT_USAGE, "Sampled mode needs --seed")
        code = load_code(params, Settings())
        f = load_tamper(function)
        validation = validate(f)
        if not validation.ok:
            emit(validation.model_dump(mode="json"), pretty, "Validation report", output)
            raise CommandFailed(
                EXIT_VALIDATION,
                "Invalid tampering function: " + ", ".join(v.check for v in validation.violations),
            )
        report = nm_certify(code, f, mode=mode, samples=samples, seed=seed, workers=workers)
        emit(report.to_json_dict(), pretty, "Non-malleability report", output)
        return EXIT_OK if report.passed else EXIT_CERTIFICATION

    run_command(body)


@app.command()
def bound(
    n: int = typer.Option(..., help="Codeword length"),
    d: int = typer.Option(..., help="LECSS distance"),
    t: int = typer.Option(..., help="LECSS secrecy"),
    rho: str = typer.Option(..., help="AMD error as a fraction, e.g. 1/100"),
    p: Optional[int] = typer.Option(None, help="Constant positions, for the per-case tail"),
    r: Optional[int] = typer.Option(None, help="Affine positions, for the per-case tail"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Evaluate the epsilon bound and its premise flags."""

    def body() -> int:
        try:
            rho_value = parse_probability(rho)
        except (ValueError, ZeroDivisionError) as exc:
            raise CommandFailed(EXIT_USAGE, f"Malformed rho {rho!r}") from exc
        if n < 1 or d < 0 or t < 0:
            raise CommandFailed(EXIT_USAGE, "n must be positive, d and t non-negative")
        report = epsilon_bound(rho_value, n, d, t, p=p, r=r)
        emit(report.model_dump(mode="json"), pretty, "Epsilon bound")
        return EXIT_OK

    run_command(body)


@app.command("search-lecss")
def search_lecss_command(
    n: int = typer.Option(..., help="Codeword length"),
    k: int = typer.Option(..., help="Message bits k_msg"),
    d: int = typer.Option(..., help="Target distance"),
    t: int = typer.Option(..., help="Target secrecy"),
    trials: int = typer.Option(100, help="Trials to run"),
    seed: Optional[int] = typer.Option(None, help="Seed, required"),
    workers: Optional[int] = typer.Option(None, help="Worker processes (default NMC_THREADS, capped by it when set)"),
    output: Optional[Path] = typer.Option(None, help="Write the result here instead of stdout"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Randomized search for a LECSS instance with distance >= d and secrecy >= t."""

    def body() -> int:
        if seed is None:
            raise CommandFailed(EXIT_USAGE, "search-lecss is randomized: pass --seed")
        result = search_lecss(n, k, d, t, trials, seed, Settings(), workers)
        emit(result.model_dump(mode="json"), pretty, "LECSS search", output)
        return EXIT_OK

    run_command(body)


@app.command("certify-lecss")
def certify_lecss_command(
    params: Path = typer.Argument(..., help="LECSS JSON, or a scheme JSON with a lecss section"),
    seed: Optional[int] = typer.Option(None, help="Seed for sampled linearity checks"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Run every LECSS certifier (correctness, distance, linearity, secrecy)."""

    def body() -> int:
        settings = Settings()
        data = load_json(params)
        lecss = LecssParams.model_validate(data.get("lecss", data))
        pairs = 1 << (lecss.k_msg + lecss.z + lecss.n)
        if pairs > settings.linearity_exhaustive_limit and seed is None:
            raise CommandFailed(EXIT_USAGE, "Linearity will be sampled for this instance: pass --seed")
        certificate = certify_lecss(LecssCode(lecss), settings, seed or 0)
        emit(certificate.model_dump(mode="json"), pretty, "LECSS certificate")
        return EXIT_OK if certificate.passed else EXIT_CERTIFICATION

    run_command(body)


@app.command("amd-audit")
def amd_audit(
    m: int = typer.Option(..., help="Field degree"),
    u: int = typer.Option(..., help="Message blocks"),
    workers: Optional[int] = typer.Option(None, help="Worker processes (default NMC_THREADS, capped by it when set)"),
    pretty: bool = typer.Option(False, help="Rich table instead of JSON"),
) -> None:
    """Exhaustive AMD security audit against (u + 1) / 2^m."""

    def body() -> int:
        settings = Settings()
        report = amd_security_oracle(
            AmdParams(m=m, u=u), settings.amd_oracle_limit, settings.worker_cap(workers)
        )
        emit(report.model_dump(mode="json"), pretty, "AMD audit")
        return EXIT_OK if report.passed else EXIT_CERTIFICATION

    run_command(body)


def _fit(word: BitWord, length: int, what: str) -> BitWord:
    """Accept hex written with whole nibbles for a length that is not a multiple of 4."""
    if word.length == length:
        return word
    if word.length == 4 * ((length + 3) // 4) and not word.value >> length:
        return BitWord(word.value, length)
    raise CommandFailed(EXIT_VALIDATION, f"{what.capitalize()} has {word.length} bits, expected {length}")


if __name__ == "__main__":
    app()
