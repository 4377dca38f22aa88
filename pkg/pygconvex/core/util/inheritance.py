class SuperStop:
    """
    Last class of every mixin chain. It swallows the keyword arguments that travelled up the cooperative
    super().__init__ calls so that object.__init__ is called without arguments.
    """

    def __init__(self, *args, **kwargs):
        mro = self.__class__.mro()
        if mro.index(SuperStop) != len(mro) - 2:
            raise ValueError("SuperStop has to be the last class before object in " + str(self.__class__)
                             + " super() callstack: " + str(mro))
        super().__init__()
