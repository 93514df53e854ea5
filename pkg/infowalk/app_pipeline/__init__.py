from .pipeline_manager import PipelineManager, load_graph
