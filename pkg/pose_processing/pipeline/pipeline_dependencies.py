from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from pose_processing.errors import ConfigurationError
from pose_processing.pipeline.models import PipelineConfig
from pose_processing.raster.science.canonical_table import CanonicalTable
from pose_processing.synthgen.models import SceneObject, ModelEntry
from pose_processing.viewspace.models import ViewSpace
from pose_processing.viewspace.science.icosphere import build_viewspace


def viewspace_path(cfg: PipelineConfig, entry: ModelEntry) -> Path:
    return cfg.paths.tables / f"viewspace_{entry.name}.json"


def canonical_table_path(cfg: PipelineConfig, entry: ModelEntry) -> Path:
    return cfg.paths.tables / f"canonical_{entry.name}.json"


def model_viewspace(cfg: PipelineConfig, entry: ModelEntry) -> ViewSpace:
    return build_viewspace(cfg.viewspace.level, cfg.viewspace.hemisphere_only, entry.symmetry,
                           cfg.viewspace.inplane_range)


@dataclass
class PipelineDependencies:
    objects: dict[int, SceneObject]
    tables: dict[int, CanonicalTable] = field(default_factory=dict)

    @property
    def viewspaces(self) -> dict[int, ViewSpace]:
        return {class_id: scene_object.viewspace for class_id, scene_object in self.objects.items()}

    @classmethod
    def fetch_dependencies(cls, cfg: PipelineConfig, with_tables: bool = True) -> PipelineDependencies:
        objects = {entry.class_id: SceneObject(entry, entry.load_mesh(cfg.paths.meshes), model_viewspace(cfg, entry))
                   for entry in cfg.models}
        if not with_tables:
            return cls(objects)

        tables = {}
        for entry in cfg.models:
            path = canonical_table_path(cfg, entry)
            if not path.exists():
                raise ConfigurationError(f"Missing canonical table {path} for {entry.name}. "
                                         f"Run the 'canonical' command with this configuration first.")
            table = CanonicalTable.from_file(path)
            viewspace = objects[entry.class_id].viewspace
            if table.camera != cfg.camera or table.z_r != cfg.canonical_distance \
                    or table.viewspace.cell_count != viewspace.cell_count:
                raise ConfigurationError(f"Canonical table {path} was built for another camera or view space. "
                                         f"Rerun the 'canonical' command.")
            tables[entry.class_id] = table
        return cls(objects, tables)
