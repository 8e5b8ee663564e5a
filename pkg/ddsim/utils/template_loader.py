"""
Template Loader Utility
Loads and renders Jinja2 report templates.
"""
from pathlib import Path
from typing import Optional

from jinja2 import Environment, FileSystemLoader, TemplateNotFound


class TemplateLoader:
    """Renders report templates from config/templates."""

    def __init__(self, templates_dir: Optional[str] = None):
        if templates_dir:
            self.templates_dir = Path(templates_dir)
        else:
            self.templates_dir = Path(__file__).parent.parent.parent / "config" / "templates"

        self.env = Environment(
            loader=FileSystemLoader(str(self.templates_dir)),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True
        )

    @staticmethod
    def _filename(template_name: str) -> str:
        return template_name if template_name.endswith('.j2') else f"{template_name}.j2"

    def has_template(self, template_name: str) -> bool:
        return (self.templates_dir / self._filename(template_name)).exists()

    def render(self, template_name: str, **variables) -> str:
        """
        Render a template with provided variables.

        Raises:
            FileNotFoundError: if the template does not exist
        """
        template_name = self._filename(template_name)
        try:
            template = self.env.get_template(template_name)
        except TemplateNotFound as e:
            raise FileNotFoundError(f"Template not found: {template_name}") from e
        return template.render(**variables)


def get_template_loader(templates_dir: Optional[str] = None) -> TemplateLoader:
    """Factory function to get template loader."""
    return TemplateLoader(templates_dir)
