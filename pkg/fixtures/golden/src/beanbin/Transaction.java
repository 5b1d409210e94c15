package beanbin;

import java.util.ArrayList;
import java.util.List;

public class Transaction {
    private final BeanBinDAO dao;
    private final Class<?> type;
    private final List<Command> commands = new ArrayList<>();

    public Transaction(BeanBinDAO dao, Class<?> type) {
        this.dao = dao;
        this.type = type;
    }

    public void addCommand(Command command) {
        commands.add(command);
    }

    public void commit() {
        for (Command command : commands) {
            command.execute(dao);
        }
        commands.clear();
    }
}
