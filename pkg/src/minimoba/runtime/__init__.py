from .frames import (FrameType, encode_frame, decode_frame, read_frame,
                     pack_payload, unpack_payload)
from .pool import MemoryPool
from .inference import InferenceServer, DirectClient, SocketClient, SocketServer, InferRequest
from .actor import ActorLoop
from .job import JobConfig, run_job

__all__ = [
    "FrameType", "encode_frame", "decode_frame", "read_frame", "pack_payload",
    "unpack_payload", "MemoryPool", "InferenceServer", "DirectClient",
    "SocketClient", "SocketServer", "InferRequest", "ActorLoop", "JobConfig",
    "run_job",
]
