#!/usr/bin/env python3
"""Wire-protocol child processes for tests.

Modes:
  uniform N      answer 1/N for each of N classes
  redmass        decode PNG instances, P(class 1) = mean red / 255
  badshape       answer with a wrong-width probability matrix
  crash          print to stderr and exit before the handshake
  hang           handshake, then never answer
"""

import base64
import io
import json
import sys
import time


def _png_mean_red(data: str) -> float:
    from PIL import Image
    import numpy as np

    with Image.open(io.BytesIO(base64.b64decode(data))) as im:
        arr = np.asarray(im.convert("RGB"), dtype=float)
    return float(arr[..., 0].mean()) / 255.0


def main() -> int:
    mode = sys.argv[1] if len(sys.argv) > 1 else "uniform"
    if mode == "crash":
        print("synthetic backend failure for tests", file=sys.stderr)
        return 3

    if mode == "uniform":
        classes = int(sys.argv[2]) if len(sys.argv) > 2 else 3
    else:
        classes = 2
    sys.stdout.write(json.dumps({"classes": classes}) + "\n")
    sys.stdout.flush()

    if mode == "hang":
        time.sleep(3600)
        return 0

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        n = len(req["instances"])
        if mode == "badshape":
            rows = [[1.0] for _ in range(n)]
        elif mode == "redmass":
            rows = []
            for inst in req["instances"]:
                p1 = _png_mean_red(inst)
                rows.append([1.0 - p1, p1])
        else:
            rows = [[1.0 / classes] * classes for _ in range(n)]
        sys.stdout.write(json.dumps({"id": req["id"], "probabilities": rows}) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
