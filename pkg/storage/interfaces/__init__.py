from .cacheable_interface import Cacheable
