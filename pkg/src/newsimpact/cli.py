"""Command-line pipeline: ingest, embed, cluster, regress, rank, report."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from newsimpact import analysis, cluster, corpus, embed, lda, svgplot
from newsimpact.errors import EmptyResultError, InputError, NewsimpactError
from newsimpact.text import load_stopwords

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_EMPTY = 3


@dataclass
class RunConfig:
    """Pipeline settings; every field has a usable default."""

    prices: str = ""
    news: str = ""
    embeddings: str = ""
    out_dir: str = "out"
    provider: str = "hashing"
    dim: int = 256
    k: int = 0  # 0 -> select via silhouette over [k_min, k_max]
    k_min: int = 2
    k_max: int = 10
    lag: int = 1
    mode: str = "per_day"
    zero_fill: bool = True
    normalize: bool = True
    seed: int = 42
    topics: int = 5  # LDA
    iters: int = 500
    top_k: int = 10
    alpha: float = 0.1
    beta: float = 0.01
    min_count: int = 2
    stopwords: str = ""
    batch_size: int = 64
    endpoint: str = ""

    def validate(self) -> None:
        if self.lag not in (0, 1):
            raise InputError(f"lag must be 0 or 1, got {self.lag}")
        if self.mode not in ("per_day", "per_headline"):
            raise InputError(f"mode must be per_day or per_headline, got {self.mode!r}")
        if self.k == 0 and not 2 <= self.k_min <= self.k_max:
            raise InputError(f"invalid K range [{self.k_min}, {self.k_max}]")
        if self.topics < 1:
            raise InputError(f"--topics must be >= 1, got {self.topics}")
        if self.top_k < 1:
            raise InputError(f"--top-k must be >= 1, got {self.top_k}")


_BOOL_VALUES = {"true": True, "yes": True, "on": True, "1": True,
                "false": False, "no": False, "off": False, "0": False}


def load_config_file(path: str | Path) -> dict:
    """Parse the flat key = value config format (a TOML-compatible subset)."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    fields = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    out: dict = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        raw = raw.strip().strip('"').strip("'")
        if key not in fields:
            raise InputError(f"{path}:{lineno}: unknown config key {key!r}")
        kind = fields[key]
        try:
            if kind == "bool" or kind is bool:
                out[key] = _BOOL_VALUES[raw.lower()]
            elif kind == "int" or kind is int:
                out[key] = int(raw)
            elif kind == "float" or kind is float:
                out[key] = float(raw)
            else:
                out[key] = raw
        except (KeyError, ValueError):
            raise InputError(f"{path}:{lineno}: bad value {raw!r} for {key}") from None
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsimpact",
        description="Quantify how news topics relate to stock returns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = (
        "ingest-prices", "ingest-news", "embed", "cluster", "regress",
        "importance", "lda", "plot", "pipeline",
    )
    for name in commands:
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--prices")
        p.add_argument("--news")
        p.add_argument("--embeddings")
        p.add_argument("--provider", choices=["hashing", "file", "http"])
        p.add_argument("--dim", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--k-min", dest="k_min", type=int)
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--lag", type=int, choices=[0, 1])
        p.add_argument("--mode", choices=["per-day", "per-headline"])
        p.add_argument("--no-zero-fill", dest="zero_fill", action="store_false",
                       default=None)
        p.add_argument("--no-normalize", dest="normalize", action="store_false",
                       default=None)
        p.add_argument("--seed", type=int)
        p.add_argument("--topics", type=int)
        p.add_argument("--iters", type=int)
        p.add_argument("--top-k", dest="top_k", type=int)
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--stopwords")
        p.add_argument("--min-count", dest="min_count", type=int)
        p.add_argument("--endpoint")
        p.add_argument("--batch-size", dest="batch_size", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(cfg, key, value)
    for f in dataclasses.fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            if f.name == "mode":
                value = value.replace("-", "_")
            setattr(cfg, f.name, value)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Stage helpers


def _provider_spec(cfg: RunConfig) -> embed.EmbeddingProviderSpec:
    import os

    endpoint = cfg.endpoint or os.environ.get(embed.EMBED_URL_ENV, "")
    return embed.EmbeddingProviderSpec(
        kind=cfg.provider,
        dim=cfg.dim,
        endpoint=endpoint,
        source=cfg.embeddings,
        seed=cfg.seed,
        normalize=cfg.normalize,
        batch_size=cfg.batch_size,
    )


def _require(path: str, what: str) -> str:
    if not path:
        raise InputError(f"missing --{what}")
    return path


def _load_headlines(cfg: RunConfig) -> list[corpus.Headline]:
    return corpus.load_headlines(_require(cfg.news, "news"))


def _embed_stage(cfg: RunConfig, headlines) -> embed.EmbeddingMatrix:
    if cfg.embeddings and cfg.provider == "hashing":
        # An explicit embeddings path implies the file provider.
        cfg.provider = "file"
    matrix = embed.embed_headlines(headlines, _provider_spec(cfg))
    expected = [str(h.id) for h in headlines]
    if matrix.ids != expected:
        raise InputError("embedding ids do not match headline ids")
    return matrix


def _cluster_stage(cfg: RunConfig, matrix) -> tuple[cluster.ClusterModel, cluster.SilhouetteReport]:
    if cfg.k:
        model = cluster.kmeans_fit(matrix, cfg.k, seed=cfg.seed)
        score = cluster.silhouette_score(matrix, model.labels, seed=cfg.seed)
        report = cluster.SilhouetteReport({cfg.k: score}, cfg.k,
                                          sampled=matrix.n > cluster.DEFAULT_SAMPLE_CAP)
    else:
        report = cluster.select_k(matrix, cfg.k_min, cfg.k_max, seed=cfg.seed)
        model = cluster.kmeans_fit(matrix, report.chosen_k, seed=cfg.seed)
    return model, report


def _regression_stage(cfg: RunConfig, headlines, model):
    bars = corpus.load_prices(_require(cfg.prices, "prices"))
    series = corpus.compute_returns(bars)
    panel = analysis.build_exposures(
        headlines, model.labels, series,
        mode=cfg.mode, lag=cfg.lag, zero_fill=cfg.zero_fill, n_topics=model.k,
    )
    return analysis.ols_fit(panel)


def write_clusters_csv(matrix, labels, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label"])
        for ident, label in zip(matrix.ids, labels):
            writer.writerow([ident, int(label)])


def write_silhouette_csv(report: cluster.SilhouetteReport, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "score", "chosen"])
        for k in sorted(report.scores):
            writer.writerow([k, f"{report.scores[k]:.6f}",
                             "1" if k == report.chosen_k else "0"])


def _markdown_table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(" --- " for _ in header) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return lines


def build_report(cfg: RunConfig, report, result, ranking) -> str:
    lines = [
        "# News topic impact report",
        "",
        f"- seed: {cfg.seed}",
        f"- provider: {cfg.provider}" + (f" (dim {cfg.dim})" if cfg.provider == "hashing" else ""),
        f"- lag: {cfg.lag}",
        f"- mode: {cfg.mode}",
        f"- zero_fill: {'on' if cfg.zero_fill else 'off'}",
        f"- silhouette path: {'sampled' if report.sampled else 'exact'}",
        "",
        "## Silhouette scores",
        "",
    ]
    lines += _markdown_table(
        ["K", "Score", "Chosen"],
        [[str(k), f"{report.scores[k]:.6f}", "yes" if k == report.chosen_k else ""]
         for k in sorted(report.scores)],
    )
    lines += ["", "## Regression results", ""]
    lines += _markdown_table(list(analysis.TABLE_COLUMNS), analysis.regression_rows(result))
    lines += [""]
    for label, value in analysis.diagnostics_footer(result):
        lines.append(f"- {label}: {value}")
    lines += ["", "## Topic importance ranking", ""]
    lines += _markdown_table(
        ["Topic", "Importance Score"],
        [[f"Topic_{t}", f"{s:.6f}"] for t, s in ranking.entries],
    )
    lines += ["", "## Artifacts", "",
              "- clusters.csv", "- silhouette.csv", "- regression.csv",
              "- importance.csv", "- clusters.svg", ""]
    return "\n".join(lines)


@dataclass
class PipelineResult:
    model: cluster.ClusterModel
    silhouette: cluster.SilhouetteReport
    regression: analysis.RegressionResult
    importance: analysis.ImportanceRanking
    out_dir: Path


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    """Library entry point behind the pipeline subcommand."""
    headlines = _load_headlines(cfg)
    matrix = _embed_stage(cfg, headlines)
    model, sil_report = _cluster_stage(cfg, matrix)
    result = _regression_stage(cfg, headlines, model)
    ranking = analysis.topic_importance(result.coef)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_clusters_csv(matrix, model.labels, out_dir / "clusters.csv")
    write_silhouette_csv(sil_report, out_dir / "silhouette.csv")
    analysis.write_regression_csv(result, out_dir / "regression.csv")
    analysis.write_importance_csv(ranking, out_dir / "importance.csv")
    projection = cluster.pca_project(matrix)
    svgplot.write_scatter(projection.points, model.labels, out_dir / "clusters.svg")
    (out_dir / "report.md").write_text(
        build_report(cfg, sil_report, result, ranking), encoding="utf-8"
    )
    return PipelineResult(model, sil_report, result, ranking, out_dir)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_ingest_prices(cfg: RunConfig) -> None:
    bars = corpus.load_prices(_require(cfg.prices, "prices"))
    series = corpus.compute_returns(bars) if len(bars) >= 2 else None
    print(f"loaded {len(bars)} price bars", end="")
    if bars:
        print(f" from {bars[0].date} to {bars[-1].date}", end="")
    print()
    if series:
        print(f"computed {len(series)} daily returns")


def cmd_ingest_news(cfg: RunConfig) -> None:
    headlines = corpus.load_headlines(_require(cfg.news, "news"))
    print(f"loaded {len(headlines)} headlines")
    if headlines:
        dates = [h.date for h in headlines]
        print(f"date range {min(dates)} to {max(dates)}")


def cmd_embed(cfg: RunConfig) -> None:
    headlines = _load_headlines(cfg)
    spec = _provider_spec(cfg)
    matrix = embed.embed_headlines(headlines, spec)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "embeddings.emb1"
    embed.save_embeddings(matrix, path)
    print(f"wrote {matrix.n}x{matrix.dim} embeddings to {path}")


def cmd_cluster(cfg: RunConfig) -> None:
    headlines = _load_headlines(cfg)
    matrix = _embed_stage(cfg, headlines)
    model, report = _cluster_stage(cfg, matrix)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_clusters_csv(matrix, model.labels, out_dir / "clusters.csv")
    write_silhouette_csv(report, out_dir / "silhouette.csv")
    print(f"clustered {matrix.n} headlines into K={model.k} topics "
          f"(inertia {model.inertia:.6f})")


def cmd_regress(cfg: RunConfig) -> None:
    headlines = _load_headlines(cfg)
    matrix = _embed_stage(cfg, headlines)
    model, _ = _cluster_stage(cfg, matrix)
    result = _regression_stage(cfg, headlines, model)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    analysis.write_regression_csv(result, out_dir / "regression.csv")
    print(analysis.format_regression_table(result))


def cmd_importance(cfg: RunConfig) -> None:
    headlines = _load_headlines(cfg)
    matrix = _embed_stage(cfg, headlines)
    model, _ = _cluster_stage(cfg, matrix)
    result = _regression_stage(cfg, headlines, model)
    ranking = analysis.topic_importance(result.coef)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    analysis.write_importance_csv(ranking, out_dir / "importance.csv")
    for topic, score in ranking.entries:
        print(f"Topic_{topic}\t{score:.6f}")


def cmd_lda(cfg: RunConfig) -> None:
    headlines = _load_headlines(cfg)
    stopwords = load_stopwords(cfg.stopwords) if cfg.stopwords else None
    vocab, docs = lda.build_vocab(headlines, min_count=cfg.min_count, stopwords=stopwords)
    if cfg.top_k > len(vocab):
        raise InputError(f"--top-k {cfg.top_k} exceeds vocabulary size {len(vocab)}")
    model = lda.lda_fit(docs, vocab, cfg.topics, alpha=cfg.alpha, beta=cfg.beta,
                        iterations=cfg.iters, seed=cfg.seed)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lda.write_keywords_csv(model, vocab, cfg.top_k, out_dir / "lda_keywords.csv")
    keywords = lda.top_keywords(model, vocab, cfg.top_k)
    lines = ["# LDA topic keywords", ""]
    lines += _markdown_table(
        ["Topic", "Keywords"],
        [[str(k), ", ".join(tokens)] for k, tokens in enumerate(keywords)],
    )
    lines.append("")
    (out_dir / "lda_keywords.md").write_text("\n".join(lines), encoding="utf-8")
    print(f"wrote keyword tables for {cfg.topics} topics to {out_dir}")


def cmd_plot(cfg: RunConfig) -> None:
    headlines = _load_headlines(cfg)
    matrix = _embed_stage(cfg, headlines)
    model, _ = _cluster_stage(cfg, matrix)
    projection = cluster.pca_project(matrix)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "clusters.svg"
    svgplot.write_scatter(projection.points, model.labels, path)
    print(f"wrote {path}")


def cmd_pipeline(cfg: RunConfig) -> None:
    result = run_pipeline(cfg)
    print(f"pipeline complete: K={result.model.k}, "
          f"n_obs={result.regression.n_obs}, artifacts in {result.out_dir}")


_COMMANDS = {
    "ingest-prices": cmd_ingest_prices,
    "ingest-news": cmd_ingest_news,
    "embed": cmd_embed,
    "cluster": cmd_cluster,
    "regress": cmd_regress,
    "importance": cmd_importance,
    "lda": cmd_lda,
    "plot": cmd_plot,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        _COMMANDS[args.command](cfg)
    except EmptyResultError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except InputError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NewsimpactError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
