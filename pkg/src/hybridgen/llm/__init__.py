from .extract import NoCodeFound, extract_code_block
from .gateway import (
    ChatRequest,
    LiveProvider,
    LLMError,
    Provider,
    RecordingProvider,
    ReplayMiss,
    ReplayProvider,
    ScriptedProvider,
    Timeout,
    TranscriptRecord,
    TranscriptWriter,
    Transport,
    complete_chat,
    prompt_digest,
    read_transcript,
)
