from pose_processing.models import InputMetadata


class Processor:
    def __init__(self, dependencies, input_metadata: InputMetadata):
        self.input_metadata = input_metadata
        self.dependencies = dependencies

    def process(self):
        raise NotImplementedError
