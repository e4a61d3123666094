"""
Key-space and scheme-property table for a list of image sizes.

Writes one CSV row per (size, scheme) so the security comparison can be
regenerated without going through the CLI one size at a time.
"""
import logging
from pathlib import Path
from typing import List, Tuple

from src.core.logs import configure_logging
from src.repositories.report_repo import ReportRepository
from src.services.analysis_service import scheme_properties

logger = logging.getLogger(__name__)


def parse_sizes(text: str) -> List[Tuple[int, int]]:
    sizes = []
    for item in text.split(","):
        w, h = item.lower().split("x")
        sizes.append((int(w), int(h)))
    return sizes


def build_table(sizes: List[Tuple[int, int]], conventional_block: int, proposed_block: int, out: Path) -> Path:
    rows = []
    for w, h in sizes:
        props = scheme_properties(w, h, (conventional_block, conventional_block), (proposed_block, proposed_block))
        for p in props:
            logger.info("%dx%d %s: %d blocks, log2 key space %.1f", w, h, p.scheme, p.blocks, p.keyspace_log2)
        rows.extend(props)
    return ReportRepository().write(rows, out)


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(
        description='Key-space table of both schemes for several image sizes'
    )
    parser.add_argument(
        '--sizes',
        type=str,
        default='384x512,512x512,1024x768',
        help='Comma-separated WIDTHxHEIGHT list (default: 384x512,512x512,1024x768)'
    )
    parser.add_argument('--conventional-block', type=int, default=16)
    parser.add_argument('--proposed-block', type=int, default=8)
    parser.add_argument(
        '--out',
        type=Path,
        default=Path('security_table.csv'),
        help='CSV (or .json) output path'
    )
    args = parser.parse_args()

    configure_logging("INFO")
    path = build_table(parse_sizes(args.sizes), args.conventional_block, args.proposed_block, args.out)
    print(f"✅ Wrote {path}")
