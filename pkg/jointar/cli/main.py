"""
Command-line entry point.

Exit codes: 0 on success, 1 when a harness (gradcheck, sweep) fails
its check, 2 on any jointar error or unreadable file.
"""
import argparse
import logging
import sys

from ..errors import JointARError
from ..sequence.permutations import RASTER, RANDOM
from ..utils.tools import timing_summary
from . import commands

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_HARNESS_FAILED, EXIT_ERROR = 0, 1, 2


def _lambdas(text):
    try:
        values = [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated floats, got %r' % text)
    if not values:
        raise argparse.ArgumentTypeError('empty lambda list')
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog='jointar',
        description='Joint autoregressive image generation and understanding '
                    'on a synthetic scene corpus.')
    parser.add_argument('--seed', type=int, default=None,
                        help='override the seed of the run config (sampling seed for sample)')
    parser.add_argument('--f64', action='store_true',
                        help='run the numerical core in 64-bit')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log INFO (-v) or DEBUG (-vv) messages and print timings')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('gen-data', help='generate the synthetic corpus')
    p.add_argument('config')

    p = sub.add_parser('train', help='train a model')
    p.add_argument('config')
    p.add_argument('--resume', metavar='CHECKPOINT', default=None,
                   help='continue from a checkpoint of this run')
    p.add_argument('--progress', action='store_true', help='show a progress bar')

    p = sub.add_parser('sample', help='generate images for a prompt')
    p.add_argument('checkpoint')
    p.add_argument('prompt')
    p.add_argument('-n', type=int, default=1, help='number of images')
    p.add_argument('--order', choices=[RASTER, RANDOM], default=RASTER,
                   help='generation order of the image tokens')
    p.add_argument('--out', default='.', help='output directory')
    p.add_argument('--no-cache', action='store_true',
                   help='recompute the full forward pass at every token')

    p = sub.add_parser('caption', help='caption a PPM image')
    p.add_argument('checkpoint')
    p.add_argument('image')

    p = sub.add_parser('vqa', help='answer a question about a PPM image')
    p.add_argument('checkpoint')
    p.add_argument('image')
    p.add_argument('question')

    p = sub.add_parser('eval', help='evaluate a checkpoint')
    p.add_argument('checkpoint')
    p.add_argument('--out', default=None, help='report directory (default: run directory)')

    p = sub.add_parser('sweep', help='lambda sweep, baselines and order comparison')
    p.add_argument('config')
    p.add_argument('--lambdas', type=_lambdas,
                   default=list(commands.DEFAULT_LAMBDAS),
                   help='comma-separated text-loss weights')
    p.add_argument('--no-baselines', action='store_true')
    p.add_argument('--no-orders', action='store_true')
    p.add_argument('--allowed-violations', type=int, default=1)
    p.add_argument('--progress', action='store_true')

    p = sub.add_parser('gradcheck', help='finite-difference gradient check')
    p.add_argument('--coords', type=int, default=10,
                   help='coordinates checked per tensor')
    p.add_argument('--lambda-text', type=float, default=1.)
    return parser


def run(args):
    """
    Execute parsed arguments; returns the exit code.
    """
    if args.command == 'gen-data':
        commands.cmd_gen_data(commands.load_run_config(args.config, args.seed, args.f64))
    elif args.command == 'train':
        config = commands.load_run_config(args.config, args.seed, args.f64)
        _, path = commands.cmd_train(config, resume=args.resume, progress=args.progress)
        print(path)
    elif args.command == 'sample':
        seed = 0 if args.seed is None else args.seed
        for path in commands.cmd_sample(args.checkpoint, args.prompt, n=args.n, seed=seed,
                                        order=args.order, out_dir=args.out, f64=args.f64,
                                        use_cache=not args.no_cache):
            print(path)
    elif args.command == 'caption':
        print(commands.cmd_caption(args.checkpoint, args.image, f64=args.f64))
    elif args.command == 'vqa':
        print(commands.cmd_vqa(args.checkpoint, args.image, args.question, f64=args.f64))
    elif args.command == 'eval':
        report, path = commands.cmd_eval(args.checkpoint, out_dir=args.out, seed=args.seed,
                                         f64=args.f64)
        print(report.text(), end='')
        print(path)
    elif args.command == 'sweep':
        config = commands.load_run_config(args.config, args.seed, args.f64)
        passed, tables = commands.cmd_sweep(config,
                                            lambdas=args.lambdas,
                                            baselines=not args.no_baselines,
                                            orders=not args.no_orders,
                                            allowed_violations=args.allowed_violations,
                                            progress=args.progress)
        for table in tables.values():
            print(table.to_string(index=False))
        print('tradeoff %s' % ('PASS' if passed else 'FAIL'))
        if not passed:
            return EXIT_HARNESS_FAILED
    elif args.command == 'gradcheck':
        seed = 0 if args.seed is None else args.seed
        report = commands.cmd_gradcheck(seed=seed, n_coords=args.coords,
                                        lambda_text=args.lambda_text)
        print(report)
        if not report.passed:
            return EXIT_HARNESS_FAILED
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    try:
        code = run(args)
    except (JointARError, OSError) as e:
        print('jointar %s: %s: %s' % (args.command, e.__class__.__name__, e), file=sys.stderr)
        code = EXIT_ERROR
    if args.verbose:
        for line in timing_summary():
            logger.info(line)
    return code


if __name__ == '__main__':
    sys.exit(main())
