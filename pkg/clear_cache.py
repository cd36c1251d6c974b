#!/usr/bin/env python3
"""
Clear the OneMax result cache
Lists the cached policy tables, then removes them together with Python bytecode caches
"""

import argparse
import glob
import os
import shutil
import sys

from modules.cache import ResultCache


def clear_onemax_cache(cache_dir=None, keep_pycache=False):
    """Remove cached tables (and __pycache__ directories unless keep_pycache)"""

    print("🧹 ONEMAX CACHE CLEARING UTILITY")
    print("=" * 50)

    cache = ResultCache(cache_dir)
    cleared_items = []
    errors = []

    entries = cache.entries()
    print(f"🔍 {len(entries)} cache entries in {os.path.abspath(cache.cache_dir)}")
    for row in entries:
        label = f"{row.get('algorithm', '?')}/{row.get('mode', '?')} n={row.get('n', '?')}"
        print(f"   • {row['file']} ({label}, {row['status']})")

    try:
        removed = cache.clear()
        if removed:
            cleared_items.append(f"Cache files: {removed}")
    except OSError as e:
        errors.append(f"Failed to clear {cache.cache_dir}: {e}")

    if not keep_pycache:
        print("\n🐍 Searching for Python cache directories...")
        for path in glob.glob("**/__pycache__", recursive=True):
            abs_path = os.path.abspath(path)
            try:
                shutil.rmtree(abs_path)
                cleared_items.append(f"Directory: {abs_path}")
            except OSError as e:
                errors.append(f"Failed to remove {abs_path}: {e}")

    print("\n" + "=" * 50)
    print("📊 CACHE CLEARING SUMMARY")
    print("=" * 50)
    if cleared_items:
        print(f"✅ Cleared {len(cleared_items)} items:")
        for item in cleared_items:
            print(f"   • {item}")
    else:
        print("ℹ️  No cache items found to clear")

    if errors:
        print(f"\n❌ {len(errors)} errors occurred:")
        for error in errors:
            print(f"   • {error}")
    return not errors


def main():
    parser = argparse.ArgumentParser(description="Clear cached OneMax policy tables")
    parser.add_argument('--cache-dir', default=None, help="cache directory (default $ONEMAX_CACHE_DIR or ./cache)")
    parser.add_argument('--keep-pycache', action='store_true')
    args = parser.parse_args()
    return 0 if clear_onemax_cache(args.cache_dir, args.keep_pycache) else 1


if __name__ == "__main__":
    sys.exit(main())
