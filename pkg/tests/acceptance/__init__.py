"""
End-to-end checks of the geometric predictions and the recovery experiments.

The expensive ones only run with SYNTHLAB_SLOW=1.
"""
import os

SLOW = os.environ.get("SYNTHLAB_SLOW", "") not in ("", "0")
