"""evalbridge command line: build fixtures, serve the protocol."""
from __future__ import annotations

from pathlib import Path

import click


@click.group()
def main():
    """Remote evaluator serving real pretrained models over labeled images."""


@main.command("make-fixtures")
@click.option("--out-dir", required=True)
@click.option("--seed", default=0, show_default=True, type=int)
def make_fixtures_cmd(out_dir, seed):
    """Generate image splits, train the default model zoo, write the manifest."""
    from .fixtures import make_fixtures

    model_dir = make_fixtures(Path(out_dir), seed=seed)
    click.echo(f"fixtures ready: models in {model_dir}, images in {Path(out_dir) / 'images'}")


@main.command()
@click.option("--model-dir", required=True, help="Directory holding manifest.json and *.pt weights.")
@click.option("--image-dir", required=True, help="Directory of <class>/<image>.png target samples.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8091, show_default=True, type=int)
@click.option("--dump-trace", default=None, help="Append every served bit to this trace CSV.")
def serve(model_dir, image_dir, host, port, dump_trace):
    """Serve GET /models, GET /samples and POST /evaluate."""
    import uvicorn

    from .server import create_app

    app = create_app(model_dir, image_dir, dump_trace)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
