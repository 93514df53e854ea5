from .file_workspace_mgt import ArtifactWorkspace, WorkspaceError
