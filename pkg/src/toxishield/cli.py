"""Command-line interface.

Subcommands: serve, analyze, classify, detoxify, evaluate (tst|cls),
curate (bin|filter|pair|split), tokenize. Global flags --config, --seed,
and --json apply everywhere sensible.
"""
from __future__ import annotations

import json
from pathlib import Path

import click

from . import __version__
from .config import ServiceConfig, load_config
from .core import LabelSet, TextSample, normalize_label
from .curation import (
    SplitSpec,
    StratifyKey,
    build_parallel_corpus,
    lexicon_filter,
    read_dataset,
    samples_from_records,
    split as split_dataset,
    stratified_sample,
    write_annotation_queue,
    write_jsonl,
    write_pairs,
)
from .errors import ToxiShieldError
from .filter import Lexicon
from .metrics import ReductionMode, multilabel_report
from .reports import (
    read_score_file,
    render_multilabel_table,
    render_tst_table,
    report_to_json,
    tst_report_from_rows,
)
from .service import Pipeline, serve as run_server, verdict_json
from .tokenizer import Vocab, tokenize


class Context:
    def __init__(self, config: ServiceConfig, seed: "int | None", as_json: bool):
        self.config = config
        self.seed = seed
        self.as_json = as_json


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Config file (INI-style sections).")
@click.option("--seed", type=int, default=None, help="Override RNG seed for curation commands.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of tables.")
@click.pass_context
def main(ctx, config_path, seed, as_json):
    """Real-time toxicity moderation for code-review comments."""
    try:
        config = load_config(config_path)
    except ToxiShieldError as exc:
        raise click.ClickException(str(exc)) from exc
    ctx.obj = Context(config, seed, as_json)


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


@main.command()
@click.option("--host", default=None, help="Bind address (overrides config).")
@click.option("--port", type=int, default=None, help="Bind port (overrides config).")
@click.pass_obj
def serve(obj: Context, host, port):
    """Run the local HTTP service."""
    config = obj.config
    if host or port:
        from dataclasses import replace

        config = replace(config, host=host or config.host, port=port or config.port)
    run_server(config)


def _read_text_arg(text: "str | None", file: "str | None") -> str:
    if text is not None and file is not None:
        raise click.UsageError("pass TEXT or --file, not both")
    if file is not None:
        return Path(file).read_text(encoding="utf-8")
    if text is None:
        raise click.UsageError("pass TEXT or --file")
    return text


@main.command()
@click.argument("text", required=False)
@click.option("--file", "file_", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
def analyze(obj: Context, text, file_):
    """Run the full pipeline on one comment."""
    body = _read_text_arg(text, file_)
    pipeline = Pipeline.from_config(obj.config)
    try:
        verdict = pipeline.analyze(TextSample(id="cli", body=body))
    except ToxiShieldError as exc:
        raise _fail(exc) from exc
    payload = verdict_json(verdict)
    if obj.as_json:
        click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
        return
    click.echo(f"score: {verdict.score:.3f}  label: {verdict.label.value}")
    if verdict.classification:
        labels = ", ".join(l.value for l in verdict.classification.labels)
        click.echo(f"categories: {labels}")
        click.echo(f"why: {verdict.classification.rationale}")
    if verdict.detox:
        click.echo(f"suggested rewrite: {verdict.detox.detoxified}")
        click.echo(f"changes: {verdict.detox.rationale}")
    if verdict.degraded.any:
        click.echo(f"degraded: {'; '.join(verdict.degraded.reasons)}", err=True)


@main.command()
@click.argument("text", required=False)
@click.option("--file", "file_", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
def classify(obj: Context, text, file_):
    """Classify one comment into toxicity subcategories (needs an LLM endpoint)."""
    body = _read_text_arg(text, file_)
    pipeline = Pipeline.from_config(obj.config)
    try:
        result = pipeline.classify(TextSample(id="cli", body=body))
    except ToxiShieldError as exc:
        raise _fail(exc) from exc
    if obj.as_json:
        click.echo(json.dumps(
            {"labels": [l.value for l in result.labels], "rationale": result.rationale},
            indent=2, ensure_ascii=False))
    else:
        click.echo(", ".join(l.value for l in result.labels))
        click.echo(result.rationale)


@main.command()
@click.argument("text", required=False)
@click.option("--file", "file_", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
def detoxify(obj: Context, text, file_):
    """Rewrite one comment into a respectful alternative (needs an LLM endpoint)."""
    body = _read_text_arg(text, file_)
    pipeline = Pipeline.from_config(obj.config)
    try:
        result = pipeline.rewrite(TextSample(id="cli", body=body))
    except ToxiShieldError as exc:
        raise _fail(exc) from exc
    if obj.as_json:
        click.echo(json.dumps(
            {"detoxified": result.detoxified, "rationale": result.rationale},
            indent=2, ensure_ascii=False))
    else:
        click.echo(result.detoxified)
        click.echo(f"-- {result.rationale}")


@main.group()
def evaluate():
    """Compute evaluation reports from score/prediction files."""


@evaluate.command("tst")
@click.argument("scorefile", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice([m.value for m in ReductionMode]),
              default=ReductionMode.NET_REDUCTION.value)
@click.option("--threshold", type=float, default=0.5)
@click.option("--name", default="model", help="Row label for the table output.")
@click.pass_obj
def evaluate_tst(obj: Context, scorefile, mode, threshold, name):
    """Detoxification metrics from a JSONL score file."""
    try:
        rows = read_score_file(scorefile)
        report = tst_report_from_rows(rows, mode=ReductionMode(mode), threshold=threshold)
    except (ToxiShieldError, ValueError) as exc:
        raise _fail(exc) from exc
    if obj.as_json:
        click.echo(report_to_json(report))
    else:
        click.echo(render_tst_table({name: report}))


@evaluate.command("cls")
@click.argument("predfile", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def evaluate_cls(obj: Context, predfile):
    """Multi-label classification metrics from JSONL {id, pred, gold} rows."""
    pred_sets: list[LabelSet] = []
    gold_sets: list[LabelSet] = []
    try:
        with open(predfile, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                pred_sets.append(LabelSet(frozenset(normalize_label(t) for t in row["pred"])))
                gold_sets.append(LabelSet(frozenset(normalize_label(t) for t in row["gold"])))
        report = multilabel_report(pred_sets, gold_sets)
    except (ToxiShieldError, ValueError, KeyError) as exc:
        raise _fail(exc) from exc
    if obj.as_json:
        click.echo(report_to_json(report))
    else:
        click.echo(render_multilabel_table(report))


@main.group()
def curate():
    """Dataset curation: binning, purification, pairing, splitting."""


def _lexicon_from(obj: Context, lexicon_path: "str | None") -> Lexicon:
    if lexicon_path:
        return Lexicon.from_file(lexicon_path)
    if obj.config.filter.lexicon_path:
        return Lexicon.from_file(obj.config.filter.lexicon_path)
    return Lexicon.bundled()


@curate.command("bin")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--quota", type=int, default=2100, show_default=True)
@click.pass_obj
def curate_bin(obj: Context, input_file, output, quota):
    """Stratified per-bin sampling into an annotation queue.

    INPUT_FILE rows need {id, body, p}; rows with p below the first bin
    are excluded.
    """
    records = read_dataset(input_file)
    scored = [
        (TextSample(id=str(r["id"]), body=str(r["body"])), float(r["p"]))
        for r in records
        if "p" in r
    ]
    seed = obj.seed if obj.seed is not None else 0
    result = stratified_sample(scored, quota_per_bin=quota, seed=seed)
    count = write_annotation_queue(result, output)
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"wrote {count} candidates to {output}")


@curate.command("filter")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--kept", "kept_path", required=True, type=click.Path(dir_okay=False))
@click.option("--removed", "removed_path", required=True, type=click.Path(dir_okay=False))
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
def curate_filter(obj: Context, input_file, kept_path, removed_path, lexicon_path):
    """Purify a candidate pool: remove rows with profanity lexicon hits."""
    records = read_dataset(input_file)
    samples = samples_from_records(records)
    by_id = {str(r["id"]): r for r in records}
    kept, removed = lexicon_filter(samples, _lexicon_from(obj, lexicon_path))
    write_jsonl((by_id[s.id] for s in kept), kept_path)
    write_jsonl((by_id[s.id] for s in removed), removed_path)
    click.echo(f"kept {len(kept)}, removed {len(removed)}")


@curate.command("pair")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--failures", "failures_path", type=click.Path(dir_okay=False), default=None)
@click.option("--concurrency", type=int, default=1, show_default=True)
@click.pass_obj
def curate_pair(obj: Context, input_file, output, failures_path, concurrency):
    """Build a parallel detox corpus with the configured teacher model."""
    client = obj.config.make_client()
    if client is None:
        raise click.ClickException(
            "no LLM endpoint configured; set llm.endpoint or LLM_ENDPOINT"
        )
    samples = samples_from_records(read_dataset(input_file))
    result = build_parallel_corpus(
        samples,
        client,
        obj.config.llm.gen_params(),
        teacher_model=obj.config.llm.model,
        concurrency=concurrency,
    )
    write_pairs(result, output)
    if failures_path:
        write_jsonl(
            ({"id": f.id, "error_kind": f.error_kind, "detail": f.detail}
             for f in result.failures),
            failures_path,
        )
    click.echo(f"{len(result.pairs)} pairs, {len(result.failures)} failures")


@curate.command("split")
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--ratios", default="80/10/10", show_default=True,
              help="Slash-separated percentages, e.g. 80/20.")
@click.option("--stratify", is_flag=True, help="Stratify on the 'label' field.")
@click.option("-o", "--output-prefix", required=True,
              help="Partitions are written to PREFIX.<name>.jsonl")
@click.pass_obj
def curate_split(obj: Context, input_file, ratios, stratify, output_prefix):
    """Seeded (optionally stratified) dataset split."""
    try:
        ratio_values = tuple(int(part) for part in ratios.split("/"))
    except ValueError:
        raise click.UsageError(f"bad --ratios {ratios!r}")
    records = read_dataset(input_file)
    spec = SplitSpec(
        ratios=ratio_values,
        seed=obj.seed if obj.seed is not None else 0,
        stratify_key=StratifyKey.BINARY_LABEL if stratify else StratifyKey.NONE,
    )
    try:
        partitions = split_dataset(records, spec)
    except (ToxiShieldError, ValueError, KeyError) as exc:
        raise _fail(exc) from exc
    for name, rows in partitions.items():
        path = f"{output_prefix}.{name}.jsonl"
        write_jsonl(rows, path)
        click.echo(f"{name}: {len(rows)} -> {path}")


@main.command("tokenize")
@click.argument("text")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Vocab file (one token per line); bundled demo vocab by default.")
@click.option("--max-len", type=int, default=None)
@click.pass_obj
def tokenize_cmd(obj: Context, text, vocab_path, max_len):
    """Debug helper: show the encoded ids and mask for a text."""
    if vocab_path:
        vocab = Vocab.from_file(vocab_path)
    else:
        from importlib import resources

        with resources.as_file(
            resources.files("toxishield").joinpath("data/demo_vocab.txt")
        ) as path:
            vocab = Vocab.from_file(path)
    limit = max_len if max_len is not None else obj.config.tokenizer_max_len
    try:
        seq = tokenize(text, vocab, limit)
    except ToxiShieldError as exc:
        raise _fail(exc) from exc
    if obj.as_json:
        click.echo(json.dumps(
            {"ids": list(seq.ids), "attention_mask": list(seq.attention_mask),
             "length": seq.length}))
        return
    by_id = vocab.tokens_by_id()
    tokens = [by_id[i] for i in seq.ids[: seq.length]]
    click.echo(" ".join(tokens))
    click.echo(f"length {seq.length} of {len(seq.ids)}")


if __name__ == "__main__":
    main()
