import argparse
import sys

from .schema import SchemaMismatch, read_curves, read_results

KINDS = ("curves", "budget", "bars", "violin")


def main(argv=None):
    p = argparse.ArgumentParser(prog="plotkit")
    sub = p.add_subparsers(dest="cmd", required=True)
    plot = sub.add_parser("plot", help="render one figure")
    plot.add_argument("kind", choices=KINDS)
    plot.add_argument("--in", dest="inputs", required=True, action="append")
    plot.add_argument("--out", required=True)
    args = p.parse_args(argv)

    try:
        for path in args.inputs:
            if path.endswith(".json"):
                read_curves(path)
            else:
                read_results(path)
    except SchemaMismatch as e:
        print(f"schema mismatch: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(e, file=sys.stderr)
        return 1
    # TODO: render the four figure kinds; inputs are validated above.
    print(f"rendering `{args.kind}` is not implemented", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
